use serde::Deserialize;
use serde_json::{json, Value};

use qmi_core::cm::{anticommutant, find_imaginary_embedding, normalizer_split, optimal_embedding_order, CMEmbedding};
use qmi_core::cohomology::{
    coboundary, cohomology_class_equal, split_cocycle, twisted_mult, verify_cocycle, Cochain1, Cocycle2, RationalUnit,
    SplitOutcome,
};
use qmi_core::cosets::{double_cosets, galois_act};
use qmi_core::fixtures::Catalog;
use qmi_core::group::FiniteGroupTable;
use qmi_core::hilbert::algebra_discriminant;
use qmi_core::lattice::Lattice4;
use qmi_core::level::{enumerate_units, LevelRing, WeilPairing};
use qmi_core::moduli::{lambda_kernel, ModuliChange};
use qmi_core::order::{order_defect, LeftIdeal, Order};
use qmi_core::projective::{defect_cocycle, det_formula_check, norm_compat_check, ProjectiveRepData};
use qmi_core::rational::format_rational;
use qmi_core::selftest::{self, SelftestConfig};
use qmi_core::{QuatAlgebra, QuatElement};

use crate::input::{decode, element, CliResult, Inputs};
use crate::{
    AlgArgs, AlgebraCmd, Cli, CmCmd, Cmd, CocycleCmd, CosetArgs, CosetsCmd, EmbeddingArgs, IdealArgs, IdealCmd,
    LevelArg, ModuliArgs, ModuliCmd, OrderArgs, OrderCmd, TorsionCmd,
};
use crate::CliError;

pub enum Output {
    Json(Value),
    Text { text: String, ok: bool },
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize")
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

struct Ctx<'a> {
    cli: &'a Cli,
    inputs: Inputs,
}

impl Ctx<'_> {
    fn order(&self, o: &OrderArgs) -> CliResult<Order> {
        self.inputs.order(o.fixture.as_deref(), o.order.as_deref())
    }

    fn level(&self, l: &LevelArg) -> CliResult<u64> {
        let n = match l.n {
            Some(n) => n,
            None => self.inputs.require("N", None)?,
        };
        if n == 0 {
            return Err(usage("level N must be positive"));
        }
        Ok(n)
    }

    fn algebra(&self, a: &AlgArgs) -> CliResult<QuatAlgebra> {
        self.inputs.algebra(a.a.as_deref(), a.b.as_deref())
    }

    fn group(&self, flag: Option<&str>) -> CliResult<FiniteGroupTable> {
        self.inputs.group("group", flag)
    }

    fn units(&self, ring: &LevelRing) -> CliResult<Vec<qmi_core::level::UnitLevel>> {
        Ok(enumerate_units(ring, self.cli.max_level)?)
    }

    /// Embedding from `--embedding`, from `--x` (with `d = -x^2`), or by search on `-d`.
    fn embedding(&self, alg: &QuatAlgebra, e: &EmbeddingArgs) -> CliResult<CMEmbedding> {
        if let Some(v) = self.inputs.raw("embedding", e.embedding.as_deref()) {
            #[derive(Deserialize)]
            struct Repr {
                d: Value,
                x: Value,
            }
            let r: Repr = decode("embedding", v)?;
            let d = match r.d {
                Value::String(s) => s.parse().map_err(|_| usage("embedding: d must be a positive integer"))?,
                v => decode("embedding.d", v)?,
            };
            return Ok(CMEmbedding::new(alg.clone(), d, element("embedding.x", r.x)?)?);
        }
        if let Some(x) = self.inputs.element("x", e.x.as_deref())? {
            let sq = alg.mul(&x, &x);
            let d = (-&sq.0[0]).to_integer();
            let d: u64 = d.try_into().map_err(|_| qmi_core::Error::InvalidEmbedding(format!("{x} does not square to a negative integer")))?;
            return Ok(CMEmbedding::new(alg.clone(), d, x)?);
        }
        let d = match e.d {
            Some(d) => d,
            None => self.inputs.get("d", None)?.ok_or_else(|| usage("give --x, --embedding or -d"))?,
        };
        Ok(find_imaginary_embedding(alg, d, self.cli.search_bound)?)
    }

    fn cocycle_values(&self, key: &str, flag: Option<&str>) -> CliResult<Vec<Vec<RationalUnit>>> {
        self.inputs.require(key, flag)
    }

    fn cocycle(&self, g: &FiniteGroupTable, key: &str, flag: Option<&str>) -> CliResult<Cocycle2> {
        Ok(Cocycle2::new(g, self.cocycle_values(key, flag)?)?)
    }
}

pub fn run(cli: &Cli) -> CliResult<Output> {
    let ctx = Ctx { cli, inputs: Inputs::load(cli.json_in.as_deref())? };
    let v = match &cli.cmd {
        Cmd::Algebra(c) => algebra(&ctx, c)?,
        Cmd::Order(c) => order(&ctx, c)?,
        Cmd::Ideal(c) => ideal(&ctx, c)?,
        Cmd::Torsion(c) => torsion(&ctx, c)?,
        Cmd::Cosets(c) => cosets(&ctx, c)?,
        Cmd::Moduli(c) => moduli(&ctx, c)?,
        Cmd::Cm(c) => cm(&ctx, c)?,
        Cmd::Cocycle(c) => cocycle(&ctx, c)?,
        Cmd::Selftest(a) => return selftest(cli, a),
    };
    Ok(Output::Json(v))
}

fn algebra(ctx: &Ctx, c: &AlgebraCmd) -> CliResult<Value> {
    Ok(match c {
        AlgebraCmd::Info(a) => to_json(&algebra_discriminant(&ctx.algebra(a)?)),
        AlgebraCmd::Mul { alg, x, y } => {
            let alg = ctx.algebra(alg)?;
            let x = ctx.inputs.require_element("x", x.as_deref())?;
            let y = ctx.inputs.require_element("y", y.as_deref())?;
            to_json(&alg.mul(&x, &y))
        }
        AlgebraCmd::Norm { alg, x } => {
            let alg = ctx.algebra(alg)?;
            let x = ctx.inputs.require_element("x", x.as_deref())?;
            json!({ "nrd": format_rational(&alg.norm(&x)), "trd": format_rational(&x.reduced_trace()) })
        }
    })
}

/// Algebra and lattice of an order input, without checking the axioms.
fn raw_order(ctx: &Ctx, o: &OrderArgs) -> CliResult<(QuatAlgebra, Lattice4)> {
    if o.fixture.is_some() {
        let ord = ctx.order(o)?;
        return Ok((ord.algebra().clone(), ord.lattice().clone()));
    }
    let v = ctx.inputs.raw("order", o.order.as_deref()).ok_or_else(|| usage("an order is required: --fixture or --order"))?;
    if let Value::String(name) = &v {
        let ord = qmi_core::fixtures::fixture(name)?;
        return Ok((ord.algebra().clone(), ord.lattice().clone()));
    }
    let alg: QuatAlgebra = decode("order.algebra", v.get("algebra").cloned().unwrap_or(Value::Null))?;
    let lat = match v.get("basis") {
        Some(b) => {
            let Value::Array(items) = b else { return Err(usage("order.basis must be a list")) };
            let gens: Vec<QuatElement> = items.iter().map(|x| element("order.basis", x.clone())).collect::<CliResult<_>>()?;
            Lattice4::from_rows(&gens)?
        }
        None => decode("order", json!({ "den": v.get("den"), "rows": v.get("rows") }))?,
    };
    Ok((alg, lat))
}

fn order(ctx: &Ctx, c: &OrderCmd) -> CliResult<Value> {
    Ok(match c {
        OrderCmd::Show(o) => to_json(&ctx.order(o)?),
        OrderCmd::Check(o) => {
            let (alg, lat) = raw_order(ctx, o)?;
            match order_defect(&lat, &alg) {
                None => json!({ "ok": true }),
                Some(why) => json!({ "ok": false, "reason": why }),
            }
        }
        OrderCmd::Disc(o) => json!({ "disc": ctx.order(o)?.reduced_discriminant()?.to_string() }),
        OrderCmd::Level(o) => json!({ "level": ctx.order(o)?.eichler_level()?.to_string() }),
        OrderCmd::Dual(o) => to_json(&ctx.order(o)?.sharp_dual()),
    })
}

fn ideal_of(ctx: &Ctx, a: &IdealArgs) -> CliResult<LeftIdeal> {
    let o = ctx.order(&a.order)?;
    if let Some(c) = ctx.inputs.rational("scale", a.scale.as_deref())? {
        return Ok(LeftIdeal::scalar(&o, &c)?);
    }
    if let Some(g) = ctx.inputs.element("generator", a.generator.as_deref())? {
        return Ok(LeftIdeal::principal(&o, &g)?);
    }
    let lat: Lattice4 = ctx
        .inputs
        .get("ideal", a.ideal.as_deref())?
        .ok_or_else(|| usage("give --scale, --generator or --ideal"))?;
    Ok(LeftIdeal::new(&o, lat)?)
}

fn ideal(ctx: &Ctx, c: &IdealCmd) -> CliResult<Value> {
    Ok(match c {
        IdealCmd::Nrd(a) => json!({ "nrd": format_rational(&ideal_of(ctx, a)?.nrd()?) }),
        IdealCmd::Degree(a) => json!({ "degree": format_rational(&ideal_of(ctx, a)?.isogeny_degree()?) }),
        IdealCmd::Kernel(a) => {
            let k = ideal_of(ctx, a)?.kernel()?;
            let mut v = to_json(&k);
            v["order"] = json!(k.order().to_string());
            v
        }
    })
}

fn torsion(ctx: &Ctx, c: &TorsionCmd) -> CliResult<Value> {
    Ok(match c {
        TorsionCmd::PairingTable { order, level } => {
            let (o, n) = (ctx.order(order)?, ctx.level(level)?);
            if n > ctx.cli.max_level {
                return Err(qmi_core::Error::LevelTooLarge { level: n, max: ctx.cli.max_level }.into());
            }
            let ring = LevelRing::new(&o, n)?;
            let w = WeilPairing::new(&ring);
            json!({ "N": n, "dual": to_json(w.dual_lattice()), "table": w.table(&ring) })
        }
        TorsionCmd::Units { order, level } => {
            let (o, n) = (ctx.order(order)?, ctx.level(level)?);
            let ring = LevelRing::new(&o, n)?;
            let units = ctx.units(&ring)?;
            json!({ "N": n, "count": units.len(), "units": units })
        }
    })
}

fn coset_space(ctx: &Ctx, a: &CosetArgs) -> CliResult<(LevelRing, qmi_core::cosets::DoubleCosetSpace)> {
    let (o, n) = (ctx.order(&a.order)?, ctx.level(&a.level)?);
    let ring = LevelRing::new(&o, n)?;
    let gamma = ctx.inputs.gamma(a.gamma.as_deref())?;
    let endo = ctx.inputs.endo(a.endo.as_deref())?;
    let space = double_cosets(&ring, &gamma, &endo, ctx.cli.max_level)?;
    Ok((ring, space))
}

fn cosets(ctx: &Ctx, c: &CosetsCmd) -> CliResult<Value> {
    Ok(match c {
        CosetsCmd::Enumerate(a) => to_json(&coset_space(ctx, a)?.1),
        CosetsCmd::Act { cosets, rho } => {
            let (ring, space) = coset_space(ctx, cosets)?;
            let rho = ctx.inputs.point("rho", rho.as_deref())?;
            let rho = ring.point(&rho.0)?;
            json!({ "permutation": galois_act(&ring, &space, &rho)? })
        }
    })
}

fn moduli_change(ctx: &Ctx, a: &ModuliArgs) -> CliResult<(Order, Order, ModuliChange)> {
    let small = ctx.inputs.named_order("small", "small", None, a.small.as_deref())?;
    let big = ctx.inputs.named_order("big", "big", None, a.big.as_deref())?;
    let n = ctx.level(&a.level)?;
    let m = ModuliChange::new(&small, &big, n)?;
    Ok((small, big, m))
}

fn moduli(ctx: &Ctx, c: &ModuliCmd) -> CliResult<Value> {
    Ok(match c {
        ModuliCmd::Lambda { args, point } => {
            let (small, _, m) = moduli_change(ctx, args)?;
            let p = LevelRing::new(&small, m.n())?.point(&ctx.inputs.point("point", point.as_deref())?.0)?;
            json!({ "point": m.lambda(&p) })
        }
        ModuliCmd::LambdaVee { args, point } => {
            let (_, big, m) = moduli_change(ctx, args)?;
            let p = LevelRing::new(&big, m.n())?.point(&ctx.inputs.point("point", point.as_deref())?.0)?;
            json!({ "point": m.lambda_vee(&p) })
        }
        ModuliCmd::Kernel(args) => {
            let (small, big, m) = moduli_change(ctx, args)?;
            let k = lambda_kernel(&small, &big, m.n())?;
            let mut v = to_json(&k);
            v["order"] = json!(k.order().to_string());
            v["index"] = json!(m.index().to_string());
            v
        }
    })
}

fn cm(ctx: &Ctx, c: &CmCmd) -> CliResult<Value> {
    Ok(match c {
        CmCmd::Embed { alg, d, bound } => {
            let alg = ctx.algebra(alg)?;
            let d = match d {
                Some(d) => *d,
                None => ctx.inputs.require("d", None)?,
            };
            to_json(&find_imaginary_embedding(&alg, d, bound.unwrap_or(ctx.cli.search_bound))?)
        }
        CmCmd::J { alg, emb } => {
            let alg = ctx.algebra(alg)?;
            let e = ctx.embedding(&alg, emb)?;
            to_json(&anticommutant(&alg, &e.x)?)
        }
        CmCmd::Normalizer { order, level, emb } => {
            let (o, n) = (ctx.order(order)?, ctx.level(level)?);
            let e = ctx.embedding(o.algebra(), emb)?;
            let ring = LevelRing::new(&o, n)?;
            let x = ring.reduce(&e.x)?;
            let units = ctx.units(&ring)?;
            let mut v = to_json(&normalizer_split(&ring, &units, &x));
            v["N"] = json!(n);
            v["x"] = to_json(&x);
            v
        }
        CmCmd::OptimalOrder { order, emb } => {
            let o = ctx.order(order)?;
            let e = ctx.embedding(o.algebra(), emb)?;
            to_json(&optimal_embedding_order(&o, &e)?)
        }
    })
}

#[derive(Deserialize)]
struct TwistedElt {
    x: Value,
    g: usize,
}

fn cocycle(ctx: &Ctx, c: &CocycleCmd) -> CliResult<Value> {
    Ok(match c {
        CocycleCmd::Verify { group, values } => {
            let g = ctx.group(group.group.as_deref())?;
            let vals = ctx.cocycle_values("values", values.as_deref())?;
            json!({ "ok": verify_cocycle(&g, &vals) })
        }
        CocycleCmd::Coboundary { group, alpha } => {
            let g = ctx.group(group.group.as_deref())?;
            let a = Cochain1::new(&g, ctx.inputs.require("alpha", alpha.as_deref())?)?;
            to_json(&coboundary(&a).values)
        }
        CocycleCmd::Split { group, values } => {
            let g = ctx.group(group.group.as_deref())?;
            match split_cocycle(&ctx.cocycle(&g, "values", values.as_deref())?) {
                SplitOutcome::Split { alpha } => json!({ "status": "split", "alpha": alpha.values }),
                SplitOutcome::Obstructed { report } => json!({ "status": "obstructed", "report": report }),
            }
        }
        CocycleCmd::ClassEq { group, c1, c2 } => {
            let g = ctx.group(group.group.as_deref())?;
            let a = ctx.cocycle(&g, "c1", c1.as_deref())?;
            let b = ctx.cocycle(&g, "c2", c2.as_deref())?;
            json!({ "equal": cohomology_class_equal(&a, &b)? })
        }
        CocycleCmd::TwistedMul { alg, group, values, lhs, rhs } => {
            let alg = ctx.algebra(alg)?;
            let g = ctx.group(group.group.as_deref())?;
            let vals = ctx.cocycle_values("values", values.as_deref())?;
            if vals.len() != g.order() || vals.iter().any(|r| r.len() != g.order()) {
                return Err(qmi_core::Error::SizeMismatch(format!("values must be {0} x {0}", g.order())).into());
            }
            let side = |key: &str, flag: Option<&String>| -> CliResult<(QuatElement, usize)> {
                let t: TwistedElt = ctx.inputs.require(key, flag.map(String::as_str))?;
                if t.g >= g.order() {
                    return Err(usage(format!("{key}.g out of range")));
                }
                Ok((element(key, t.x)?, t.g))
            };
            let (x, s) = twisted_mult(&alg, &g, &vals, &side("lhs", lhs.as_ref())?, &side("rhs", rhs.as_ref())?);
            json!({ "x": x, "g": s })
        }
        CocycleCmd::Defect { order, level, rep } => {
            let ring = LevelRing::new(&ctx.order(order)?, ctx.level(level)?)?;
            let data: ProjectiveRepData = ctx.inputs.require("rep", rep.as_deref())?;
            to_json(&defect_cocycle(&ring, &data)?.values)
        }
        CocycleCmd::DetCheck { order, level, rep, alpha } => {
            let ring = LevelRing::new(&ctx.order(order)?, ctx.level(level)?)?;
            let data: ProjectiveRepData = ctx.inputs.require("rep", rep.as_deref())?;
            let alpha = match ctx.inputs.get::<Vec<RationalUnit>>("alpha", alpha.as_deref())? {
                Some(v) => Cochain1::new(&data.group, v)?,
                None => Cochain1::trivial(&data.group),
            };
            let det = det_formula_check(&ring, &data, &alpha)?;
            let norm = norm_compat_check(&ring, &data)?;
            json!({ "ok": det.iter().all(|&b| b), "det": det, "norm": norm })
        }
    })
}

fn selftest(cli: &Cli, a: &crate::SelftestArgs) -> CliResult<Output> {
    let catalog = match &a.corrupt_fixture {
        Some(name) => {
            qmi_core::fixtures::fixture_data(name)?;
            Catalog::with_corrupted(name)
        }
        None => Catalog::new(),
    };
    if let Some(bad) = a.only.iter().find(|&&id| !(1..=10).contains(&id)) {
        return Err(usage(format!("--only: no criterion {bad}")));
    }
    let cfg = SelftestConfig { max_level: cli.max_level, seed: a.seed, catalog, only: a.only.clone() };
    let r = selftest::run(&cfg);
    let text = if a.json {
        format!("{}\n", to_json(&r))
    } else {
        let mut s: String = r.criteria.iter().map(|c| c.line() + "\n").collect();
        s += &format!("{} in {} ms\n", if r.passed { "PASSED" } else { "FAILED" }, r.elapsed_ms);
        s
    };
    Ok(Output::Text { text, ok: r.passed })
}
