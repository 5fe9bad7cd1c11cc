//! Dense exact linear algebra over Z and Q.
//!
//! Matrices are plain `Vec<Vec<_>>` in row-major order; everything here is
//! small (at most a few dozen rows), so clarity wins over cleverness.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational;

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn int_matrix<const C: usize>(rows: &[[i64; C]]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IntMatrix, x: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(BigInt::zero(), |acc, (r, v)| acc + r * v))
        .collect()
}

fn row_sub_mul(rows: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (t, s) = if target < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

/// Row Hermite normal form: the nonzero rows of the result are in echelon
/// form with positive pivots, and every entry above a pivot lies in
/// `[0, pivot)`. Zero rows are dropped, so the result length is the rank.
pub fn hnf_rows(mut rows: IntMatrix) -> IntMatrix {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut p = 0;
    for col in 0..ncols {
        if p == rows.len() {
            break;
        }
        loop {
            let best = (p..rows.len())
                .filter(|&r| !rows[r][col].is_zero())
                .min_by(|&x, &y| rows[x][col].abs().cmp(&rows[y][col].abs()));
            let Some(best) = best else { break };
            rows.swap(p, best);
            let mut done = true;
            for r in p + 1..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let q = rows[r][col].div_floor(&rows[p][col]);
                row_sub_mul(&mut rows, r, p, &q);
                if !rows[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[p][col].is_zero() {
            continue;
        }
        if rows[p][col].is_negative() {
            for x in rows[p].iter_mut() {
                *x = -&*x;
            }
        }
        for r in 0..p {
            let q = rows[r][col].div_floor(&rows[p][col]);
            row_sub_mul(&mut rows, r, p, &q);
        }
        p += 1;
    }
    rows.truncate(p);
    rows
}

/// Smith normal form `U * A * V = D` with unimodular `U`, `V`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Diagonal of `D`, nonnegative, each entry dividing the next; zeros last.
    pub diag: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|d| !d.is_zero()).count()
    }
}

pub fn smith(a: &IntMatrix) -> Smith {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut a = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);

    let swap_cols = |mat: &mut IntMatrix, i: usize, j: usize| {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    };
    // col_j -= q * col_i
    let col_sub_mul = |mat: &mut IntMatrix, j: usize, i: usize, q: &BigInt| {
        for row in mat.iter_mut() {
            let t = &row[i] * q;
            row[j] -= t;
        }
    };

    for t in 0..m.min(n) {
        let mut pivot = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero()
                    && pivot.map_or(true, |(pi, pj): (usize, usize)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_sub_mul(&mut a, i, t, &q);
                row_sub_mul(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_sub_mul(&mut a, j, t, &q);
                col_sub_mul(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // Move the smallest leftover in row/column t onto the diagonal.
                let mut best = (t, t);
                for i in t + 1..m {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.1 == t && best.0 != t {
                    a.swap(t, best.0);
                    u.swap(t, best.0);
                } else if best.0 == t && best.1 != t {
                    swap_cols(&mut a, t, best.1);
                    swap_cols(&mut v, t, best.1);
                }
                continue;
            }
            // Divisibility: fold an offending row into row t and go again.
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    let neg_one = -BigInt::one();
                    row_sub_mul(&mut a, t, i, &neg_one);
                    row_sub_mul(&mut u, t, i, &neg_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    let diag = (0..m.min(n)).map(|i| a[i][i].clone()).collect();
    Smith { diag, u, v }
}

/// Outcome of solving `A x = b` over the integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntSolution {
    Solution(Vec<BigInt>),
    /// `weights . A == 0 (mod modulus)` while `weights . b != 0 (mod modulus)`;
    /// a zero modulus means exact equality over Z.
    Obstruction { weights: Vec<BigInt>, modulus: BigInt },
}

pub fn solve_integer(a: &IntMatrix, b: &[BigInt], snf: &Smith) -> IntSolution {
    let n = a.first().map_or(0, Vec::len);
    let y = mat_vec(&snf.u, b);
    let mut z = vec![BigInt::zero(); n];
    for (i, yi) in y.iter().enumerate() {
        let d = snf.diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !yi.is_zero() {
                return IntSolution::Obstruction { weights: snf.u[i].clone(), modulus: BigInt::zero() };
            }
        } else if !(yi % &d).is_zero() {
            return IntSolution::Obstruction { weights: snf.u[i].clone(), modulus: d };
        } else {
            z[i] = yi / &d;
        }
    }
    IntSolution::Solution(mat_vec(&snf.v, &z))
}

/// Basis of `{x in Z^n : A x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let n = a.first().map_or(0, Vec::len);
    let s = smith(a);
    let r = s.rank();
    (r..n).map(|j| s.v.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rat_det(m: &RatMatrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

pub fn rat_inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of the right kernel `{x : M x = 0}` over Q.
pub fn rat_kernel(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -&a[r][f];
            }
            x
        })
        .collect()
}

/// Scale a rational vector to a primitive integer vector (same direction).
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let den = crate::rational::common_denominator(v.iter());
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}
