//! Exact linear algebra over `Q` and `Z`.
//!
//! Matrices are small (dimension rarely exceeds six), so everything here is
//! plain dense Gaussian elimination on `BigRational`, fraction-free Bareiss
//! for integer determinants, and a textbook Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QMatrix = Vec<Vec<BigRational>>;

pub fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

pub fn int_rows_to_q(rows: &[Vec<BigInt>]) -> QMatrix {
    rows.iter()
        .map(|r| r.iter().map(|c| BigRational::from_integer(c.clone())).collect())
        .collect()
}

/// Reduced row echelon form. Zero rows are dropped; `pivots[i]` is the pivot
/// column of row `i`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: QMatrix,
    pub pivots: Vec<usize>,
}

pub fn rref(mut rows: QMatrix, ncols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Echelon { rows, pivots }
}

pub fn rank(rows: &QMatrix, ncols: usize) -> usize {
    rref(rows.clone(), ncols).rows.len()
}

/// Basis of `{x : A x = 0}`.
pub fn null_space(rows: &QMatrix, ncols: usize) -> QMatrix {
    let ech = rref(rows.clone(), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !ech.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Inconsistent,
    Unique(Vec<BigRational>),
    /// A particular solution plus a kernel basis of positive dimension.
    Family {
        particular: Vec<BigRational>,
        kernel: QMatrix,
    },
}

/// Solves `A x = b` for `x` with `ncols` unknowns.
pub fn solve(a: &QMatrix, b: &[BigRational], ncols: usize) -> Solution {
    let aug: QMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let ech = rref(aug, ncols + 1);
    if ech.pivots.contains(&ncols) {
        return Solution::Inconsistent;
    }
    let mut particular = vec![BigRational::zero(); ncols];
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        particular[p] = row[ncols].clone();
    }
    let kernel = null_space(a, ncols);
    if kernel.is_empty() {
        Solution::Unique(particular)
    } else {
        Solution::Family { particular, kernel }
    }
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn det_integer(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Scales a nonzero rational vector to the primitive integer vector on the
/// same ray.
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

/// Smith normal form `U A V = D` of an integer matrix. Only the unimodular
/// row transform `U` is retained; it is what maps `Z^rows` onto cokernel
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    /// Nonzero invariant factors `d_1 | d_2 | ...`, all positive.
    pub invariants: Vec<BigInt>,
    pub row_transform: Vec<Vec<BigInt>>,
}

pub fn smith_normal_form(m: &[Vec<BigInt>], ncols: usize) -> Smith {
    let nrows = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..nrows)
        .map(|i| (0..nrows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let row_axpy = |a: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, f: &BigInt| {
        let src_row = a[src].clone();
        for (x, y) in a[dst].iter_mut().zip(&src_row) {
            *x -= f * y;
        }
    };

    let mut t = 0;
    while t < nrows.min(ncols) {
        // pivot: smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        loop {
            let mut dirty = false;
            for i in t + 1..nrows {
                if a[i][t].is_zero() {
                    continue;
                }
                let f = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &f);
                row_axpy(&mut u, i, t, &f);
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..ncols {
                if a[t][j].is_zero() {
                    continue;
                }
                let f = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut() {
                    let v = &row[t] * &f;
                    row[j] -= v;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block
            let bad = (t + 1..nrows)
                .flat_map(|i| (t + 1..ncols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    // row t += row i, then keep reducing
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    let invariants = (0..t).map(|i| a[i][i].clone()).collect();
    Smith {
        invariants,
        row_transform: u,
    }
}

pub fn mat_vec(m: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}
