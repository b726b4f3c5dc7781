//! Exact rank and nullspace by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use liouville_expr::Rational;

/// Row echelon form of an integer matrix with its pivot columns.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

/// Clear denominators row by row.
fn integer_rows(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            assert_eq!(row.len(), ncols, "ragged matrix");
            let lcm = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            row.iter().map(|r| r.numer() * (&lcm / r.denom())).collect()
        })
        .filter(|row: &Vec<BigInt>| row.iter().any(|v| !v.is_zero()))
        .collect()
}

fn bareiss(mut m: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    let nrows = m.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        // smallest nonzero entry keeps the intermediate numbers short
        let Some(p) = (r..nrows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by(|&i, &j| m[i][c].magnitude().cmp(m[j][c].magnitude()))
        else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = &pivot_row[c];
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..ncols {
                let v = piv * &row[j] - &factor * &pivot_row[j];
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Echelon { rows: m, pivots }
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    bareiss(integer_rows(rows, ncols), ncols).pivots.len()
}

/// Basis of `{v : M v = 0}`, each vector scaled to coprime integers with a positive
/// leading entry.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let ech = bareiss(integer_rows(rows, ncols), ncols);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &c in &ech.pivots {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![Rational::zero(); ncols];
        x[free] = Rational::one();
        for (row, &pc) in ech.rows.iter().zip(ech.pivots.iter()).rev() {
            let mut acc = Rational::zero();
            for j in pc + 1..ncols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    acc += Rational::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[pc] = -acc / Rational::from_integer(row[pc].clone());
        }
        basis.push(primitive(x));
    }
    basis
}

/// Scale to coprime integers with positive first nonzero entry.
pub fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = v.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
    if g.is_zero() {
        return v;
    }
    if ints.iter().find(|n| !n.is_zero()).is_some_and(|n| n.is_negative()) {
        g = -g;
    }
    ints.into_iter().map(|n| Rational::from_integer(n / &g)).collect()
}
