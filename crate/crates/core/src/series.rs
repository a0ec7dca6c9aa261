//! Bivariate generating function for planar tanglegrams by size and leaf-matched pairs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::enumeration::{census, CensusRow, ENUMERATION_LIMIT};
use crate::error::{invalid, Error, Result};

/// Truncated series `sum coeff[n][k] x^n q^k` with `n, k <= max_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTable {
    pub max_degree: usize,
    pub coeff: Vec<Vec<BigRational>>,
}

impl SeriesTable {
    pub fn zero(max_degree: usize) -> SeriesTable {
        SeriesTable {
            max_degree,
            coeff: vec![vec![BigRational::zero(); max_degree + 1]; max_degree + 1],
        }
    }

    pub fn get(&self, n: usize, k: usize) -> &BigRational {
        &self.coeff[n][k]
    }

    fn mul(&self, other: &SeriesTable) -> SeriesTable {
        let d = self.max_degree;
        let mut out = SeriesTable::zero(d);
        for n1 in 0..=d {
            for k1 in 0..=d {
                let a = &self.coeff[n1][k1];
                if a.is_zero() {
                    continue;
                }
                for n2 in 0..=d - n1 {
                    for k2 in 0..=d - k1 {
                        let b = &other.coeff[n2][k2];
                        if !b.is_zero() {
                            out.coeff[n1 + n2][k1 + k2] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    fn add_scaled(&mut self, other: &SeriesTable, c: &BigRational) {
        for (row, orow) in self.coeff.iter_mut().zip(&other.coeff) {
            for (a, b) in row.iter_mut().zip(orow) {
                *a += b * c;
            }
        }
    }

    /// `F(x^2, q^2)`, truncated.
    fn squared_arguments(&self) -> SeriesTable {
        let d = self.max_degree;
        let mut out = SeriesTable::zero(d);
        for n in 0..=d / 2 {
            for k in 0..=d / 2 {
                out.coeff[2 * n][2 * k] = self.coeff[n][k].clone();
            }
        }
        out
    }

    /// Multiplies by `q`, dropping the top power.
    fn times_q(&self) -> SeriesTable {
        let d = self.max_degree;
        let mut out = SeriesTable::zero(d);
        for n in 0..=d {
            for k in 0..d {
                out.coeff[n][k + 1] = self.coeff[n][k].clone();
            }
        }
        out
    }

    /// Coefficients of `x^n` as a census row, requiring integers.
    pub fn row(&self, n: usize) -> Result<CensusRow> {
        let mut counts = BTreeMap::new();
        for (k, c) in self.coeff[n].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !c.is_integer() {
                return Err(Error::Consistency(format!("coefficient of x^{n} q^{k} is {c}")));
            }
            let v: u64 = c
                .to_integer()
                .try_into()
                .map_err(|_| Error::Consistency(format!("coefficient of x^{n} q^{k} is out of range")))?;
            counts.insert(k, v);
        }
        Ok(CensusRow::from_counts(n, counts))
    }

    /// `n,k,count` lines for `2 <= n <= max_degree`.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("n,k,count\n");
        for n in 2..=self.max_degree {
            for (k, c) in &self.row(n)?.counts {
                out.push_str(&format!("{n},{k},{c}\n"));
            }
        }
        Ok(out)
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `H` as a table with coefficients only in the `q^0` column.
fn h_table(max_degree: usize, h: &BTreeMap<usize, BigRational>) -> Result<SeriesTable> {
    let mut t = SeriesTable::zero(max_degree);
    for n in 2..=max_degree {
        let c = h
            .get(&n)
            .ok_or_else(|| invalid(format!("missing irreducible count for size {n}")))?;
        t.coeff[n][0] = c.clone();
    }
    Ok(t)
}

/// Irreducible planar counts: `h_2 = 1/2`, and `h_n` for `n >= 3` from the census `k = 1` column.
/// Values in `overrides` replace or extend the computed ones.
pub fn irreducible_series(
    max_degree: usize,
    overrides: &BTreeMap<usize, BigRational>,
    threads: Option<usize>,
) -> Result<SeriesTable> {
    let mut h = BTreeMap::new();
    if max_degree >= 2 {
        h.insert(2, rat(1, 2));
    }
    if let Some(n) = (3..=max_degree).find(|n| *n > ENUMERATION_LIMIT && !overrides.contains_key(n)) {
        return Err(invalid(format!(
            "size {n} is beyond the enumeration limit; supply it in an H file"
        )));
    }
    for n in 3..=max_degree {
        if overrides.contains_key(&n) {
            continue;
        }
        let row = census(n, threads)?;
        h.insert(n, BigRational::from_integer(BigInt::from(*row.counts.get(&1).unwrap_or(&0))));
    }
    for (&n, c) in overrides {
        if n >= 2 && n <= max_degree {
            h.insert(n, c.clone());
        }
    }
    h_table(max_degree, &h)
}

/// Parses lines `n num/den` (or `n num`); `#` starts a comment.
pub fn parse_h_file(text: &str) -> Result<BTreeMap<usize, BigRational>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let err = |token: &str, message: &str| Error::Parse {
            line,
            token: token.to_string(),
            message: message.to_string(),
        };
        if toks.len() != 2 {
            return Err(err(body, "expected `n numerator/denominator`"));
        }
        let n: usize = toks[0].parse().map_err(|_| err(toks[0], "bad size"))?;
        let (num, den) = toks[1].split_once('/').unwrap_or((toks[1], "1"));
        let num: BigInt = num.parse().map_err(|_| err(toks[1], "bad numerator"))?;
        let den: BigInt = den.parse().map_err(|_| err(toks[1], "bad denominator"))?;
        if den.is_zero() {
            return Err(err(toks[1], "zero denominator"));
        }
        out.insert(n, BigRational::new(num, den));
    }
    Ok(out)
}

fn compose(h: &SeriesTable, f: &SeriesTable) -> SeriesTable {
    let d = f.max_degree;
    let mut out = SeriesTable::zero(d);
    let mut power = f.clone();
    for m in 1..=d {
        if m > 1 {
            power = power.mul(f);
        }
        let c = &h.coeff[m][0];
        if !c.is_zero() {
            out.add_scaled(&power, c);
        }
    }
    out
}

fn check_integral(f: &SeriesTable) -> Result<()> {
    for n in 0..=f.max_degree {
        f.row(n)?;
    }
    Ok(())
}

fn solve_with(h: &SeriesTable, step: impl Fn(&SeriesTable) -> SeriesTable) -> Result<SeriesTable> {
    let d = h.max_degree;
    let mut f = SeriesTable::zero(d);
    if d >= 1 {
        f.coeff[1][0] = BigRational::one();
    }
    for _ in 0..d {
        f = step(&f);
    }
    check_integral(&f)?;
    Ok(f)
}

fn x_only(d: usize) -> SeriesTable {
    let mut x = SeriesTable::zero(d);
    if d >= 1 {
        x.coeff[1][0] = BigRational::one();
    }
    x
}

/// Fixed-point solution of `F = x + q H(F) + q F(x^2, q^2) / 2`.
pub fn solve_f(h: &SeriesTable) -> Result<SeriesTable> {
    let d = h.max_degree;
    let half = rat(1, 2);
    solve_with(h, |f| {
        let mut inner = compose(h, f);
        inner.add_scaled(&f.squared_arguments(), &half);
        let mut next = x_only(d);
        next.add_scaled(&inner.times_q(), &BigRational::one());
        next
    })
}

/// Same solution via `F = x + q (H(F) - F^2/2) + q (F^2 + F(x^2, q^2)) / 2`.
pub fn solve_f_rearranged(h: &SeriesTable) -> Result<SeriesTable> {
    let d = h.max_degree;
    let half = rat(1, 2);
    solve_with(h, |f| {
        let sq = f.mul(f);
        let mut reducible = compose(h, f);
        reducible.add_scaled(&sq, &-half.clone());
        let mut symmetric = sq;
        symmetric.add_scaled(&f.squared_arguments(), &BigRational::one());
        let mut next = x_only(d);
        next.add_scaled(&reducible.times_q(), &BigRational::one());
        next.add_scaled(&symmetric.times_q(), &half);
        next
    })
}
