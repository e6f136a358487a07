//! Constant-term identities of Dyson type and the changes of variables that
//! prove them.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::calculus;
use crate::coeff::{self, Coefficient};
use crate::error::{MnError, Result};
use crate::order::{determinant, ExponentVector, FieldSpec, PrecisionBox};
use crate::series::{Budget, Series};

/// Identity-ordered field on `z1, ..., zn`; `zn` is most significant.
pub fn z_spec(n: usize) -> Arc<FieldSpec> {
    let vars: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
    Arc::new(FieldSpec::identity(&vars).expect("distinct names"))
}

fn z(spec: &Arc<FieldSpec>, i: usize) -> Series {
    Series::monomial(spec, Coefficient::one(), ExponentVector::unit(spec.nvars(), i))
}

fn monomial(spec: &Arc<FieldSpec>, c: Coefficient, exp: Vec<i64>) -> Series {
    Series::monomial(spec, c, ExponentVector(exp))
}

fn product(spec: &Arc<FieldSpec>, factors: impl IntoIterator<Item = Series>) -> Result<Series> {
    factors.into_iter().try_fold(Series::one(spec), |acc, f| acc.mul(&f))
}

/// `prod_{i<j, i,j in idx} (z_i - z_j)` in `spec`.
fn vandermonde_on(spec: &Arc<FieldSpec>, idx: &[usize]) -> Result<Series> {
    let mut factors = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            factors.push(z(spec, i).sub(&z(spec, j))?);
        }
    }
    product(spec, factors)
}

/// `prod_{i<j} (z_i - z_j)`.
pub fn vandermonde(n: usize) -> Result<Series> {
    let spec = z_spec(n.max(1));
    vandermonde_on(&spec, &(0..n).collect::<Vec<_>>())
}

/// `det(z_i^(n-j))`.
pub fn vandermonde_det(n: usize) -> Result<Series> {
    let spec = z_spec(n);
    let m: Vec<Vec<Series>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut e = vec![0i64; n];
                    e[i] = (n - 1 - j) as i64;
                    monomial(&spec, Coefficient::one(), e)
                })
                .collect()
        })
        .collect();
    calculus::determinant_series(&m)
}

/// Complete homogeneous symmetric function of degree `k` in all variables
/// of `spec`, through `h_k(z_1..z_m) = sum_i z_m^i h_(k-i)(z_1..z_(m-1))`.
pub fn complete_homogeneous(spec: &Arc<FieldSpec>, k: usize) -> Result<Series> {
    let n = spec.nvars();
    // row[d] = h_d in the first m variables
    let mut row: Vec<Series> = (0..=k).map(|d| if d == 0 { Series::one(spec) } else { Series::zero(spec) }).collect();
    for m in 0..n {
        let zm = z(spec, m);
        let mut next = row.clone();
        for d in 1..=k {
            next[d] = next[d].add(&next[d - 1].mul(&zm)?)?;
        }
        row = next;
    }
    Ok(row.swap_remove(k))
}

/// `CT (a * b)` without forming the product.
pub fn ct_of_product(a: &Series, b: &Series) -> Result<Coefficient> {
    if a.spec() != b.spec() {
        return Err(MnError::SpecMismatch);
    }
    let mut acc = Coefficient::zero();
    for t in a.terms() {
        let c = b.coefficient(&-&t.exponent)?;
        if !c.is_zero() {
            acc += t.coeff * c;
        }
    }
    Ok(acc)
}

// ---- Dyson ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DysonInstance {
    pub a: Vec<u32>,
    pub generalized: bool,
}

/// Both sides of a constant-term identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub lhs: Coefficient,
    pub rhs: Coefficient,
}

impl IdentityReport {
    pub fn equal(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn multinomial(a: &[u32]) -> Coefficient {
    let total: u64 = a.iter().map(|&x| x as u64).sum();
    let mut den = BigInt::one();
    for &x in a {
        den *= coeff::factorial(x as u64);
    }
    Coefficient::new(coeff::factorial(total), den)
}

/// The factors `(1 - z_i/z_j)^(a_j)` for `i != j`.
fn dyson_factors(spec: &Arc<FieldSpec>, a: &[u32]) -> Result<Vec<Series>> {
    let n = a.len();
    let mut out = Vec::new();
    for j in 0..n {
        if a[j] == 0 {
            continue;
        }
        for i in (0..n).filter(|&i| i != j) {
            let mut e = vec![0i64; n];
            e[i] = 1;
            e[j] = -1;
            let f = Series::one(spec).sub(&monomial(spec, Coefficient::one(), e))?;
            out.push(f.pow(a[j], None)?);
        }
    }
    Ok(out)
}

/// Constant term of the Dyson product, optionally times
/// `(z_1 + ... + z_n)^(sum a) / prod z_i^(a_i)`, against the multinomial.
pub fn dyson_ct(inst: &DysonInstance) -> Result<IdentityReport> {
    let n = inst.a.len();
    if n < 2 {
        return Err(MnError::Usage("a Dyson instance needs at least two exponents".into()));
    }
    let spec = z_spec(n);
    let mut factors = dyson_factors(&spec, &inst.a)?;
    if inst.generalized {
        let total: u32 = inst.a.iter().sum();
        let sum = (0..n).try_fold(Series::zero(&spec), |acc, i| acc.add(&z(&spec, i)))?;
        let shift = inst.a.iter().map(|&x| -(x as i64)).collect();
        factors.push(sum.pow(total, None)?.mul_monomial(&Coefficient::one(), &ExponentVector(shift)));
    }
    // balance the two halves so the final dot product replaces the largest multiplication
    factors.sort_by_key(Series::len);
    let (mut left, mut right) = (Series::one(&spec), Series::one(&spec));
    for f in factors.into_iter().rev() {
        if left.len() <= right.len() {
            left = left.mul(&f)?;
        } else {
            right = right.mul(&f)?;
        }
    }
    let lhs = ct_of_product(&left, &right)?;
    Ok(IdentityReport { lhs, rhs: multinomial(&inst.a) })
}

/// Runs many instances, in parallel when the feature is enabled.
pub fn dyson_sweep(instances: &[DysonInstance]) -> Vec<Result<IdentityReport>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        instances.par_iter().map(dyson_ct).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        dyson_sweep_sequential(instances)
    }
}

pub fn dyson_sweep_sequential(instances: &[DysonInstance]) -> Vec<Result<IdentityReport>> {
    instances.iter().map(dyson_ct).collect()
}

/// All exponent vectors of length `n` with entries in `0..=max_entry` and sum
/// at most `max_sum`.
pub fn exponent_vectors(n: usize, max_entry: u32, max_sum: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, max_entry: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=max_entry.min(left) {
            cur[i] = v;
            rec(i + 1, left - v, max_entry, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, max_sum, max_entry, &mut cur, &mut out);
    out
}

/// `sum_j (-1)^j C(a+b, a+j) C(b+c, b+j) C(c+a, c+j)`.
pub fn dixon_sum(a: u32, b: u32, c: u32) -> Coefficient {
    let (a, b, c) = (a as i64, b as i64, c as i64);
    let m = a + b + c;
    let mut acc = BigInt::zero();
    for j in -m..=m {
        let t = coeff::binomial(a + b, a + j) * coeff::binomial(b + c, b + j) * coeff::binomial(c + a, c + j);
        if j % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    Coefficient::from_integer(acc)
}

// ---- the u^(r) family --------------------------------------------------------------

/// `u_j = (-1)^(j-1) z_j^r Delta_j(z)` for `j = 1..n`.
#[derive(Debug, Clone)]
pub struct UrFamily {
    pub n: usize,
    pub r: i64,
    pub u: Vec<Series>,
}

pub fn u_r_build(n: usize, r: i64) -> Result<UrFamily> {
    if n < 2 {
        return Err(MnError::Usage("the u^(r) family needs n >= 2".into()));
    }
    let spec = z_spec(n);
    let mut u = Vec::with_capacity(n);
    for j in 0..n {
        let others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        let delta_j = vandermonde_on(&spec, &others)?;
        let mut e = vec![0i64; n];
        e[j] = r;
        let sign = if j % 2 == 0 { coeff::int(1) } else { coeff::int(-1) };
        u.push(delta_j.mul_monomial(&sign, &ExponentVector(e)));
    }
    Ok(UrFamily { n, r, u })
}

impl UrFamily {
    pub fn sum(&self) -> Result<Series> {
        self.u.iter().skip(1).try_fold(self.u[0].clone(), |acc, s| acc.add(s))
    }

    /// `h_(r-n+1) * Delta` for `r >= n-1`, zero below.
    pub fn expected_sum(&self) -> Result<Series> {
        let spec = self.u[0].spec().clone();
        let k = self.r - self.n as i64 + 1;
        if k < 0 {
            return Ok(Series::zero(&spec));
        }
        let delta = vandermonde_on(&spec, &(0..self.n).collect::<Vec<_>>())?;
        complete_homogeneous(&spec, k as usize)?.mul(&delta)
    }

    pub fn jacobian_number(&self) -> Result<i64> {
        calculus::jacobian_number(&self.u, &(0..self.n).collect::<Vec<_>>())
    }

    /// Exponent rows of the initial monomials.
    pub fn initial_matrix(&self) -> Result<Vec<Vec<i64>>> {
        self.u.iter().map(|s| Ok(s.initial_term()?.exponent.0)).collect()
    }
}

/// Matrix with diagonal `r` whose off-diagonal entries in every row are
/// `n-2, n-3, ..., 0` from left to right.
pub fn j_r_matrix(n: usize, r: i64) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| {
            let mut next = n as i64 - 2;
            (0..n)
                .map(|j| {
                    if i == j {
                        r
                    } else {
                        next -= 1;
                        next + 1
                    }
                })
                .collect()
        })
        .collect()
}

pub fn j_r_determinant(n: usize, r: i64) -> i64 {
    determinant(&j_r_matrix(n, r)) as i64
}

/// `r (r-1) ... (r-n+2) (r + C(n-1, 2))`.
pub fn j_r_closed_form(n: usize, r: i64) -> i64 {
    let n = n as i64;
    let falling: i64 = (0..n - 1).map(|i| r - i).product();
    falling * (r + (n - 1) * (n - 2) / 2)
}

// ---- Wilson's change of variables -----------------------------------------------

/// `v_j = prod_{i != j} (1 - z_j/z_i)^-1` (`j` is 1-based), expanded in the
/// identity-ordered field under `budget`.
pub fn wilson_v(n: usize, j: usize, budget: &Budget) -> Result<Series> {
    if j == 0 || j > n {
        return Err(MnError::Usage(format!("index {j} out of range 1..={n}")));
    }
    let spec = z_spec(n);
    let mut acc = Series::one(&spec);
    for i in (0..n).filter(|&i| i != j - 1) {
        let mut e = vec![0i64; n];
        e[j - 1] = 1;
        e[i] = -1;
        let f = Series::one(&spec).sub(&monomial(&spec, Coefficient::one(), e))?;
        acc = acc.mul_capped(&f.invert(budget)?, Some(budget.bound))?;
    }
    Ok(acc)
}

/// `CT_z prod_j v_j^(-a_j)` computed from the truncated `v_j`.
pub fn wilson_dyson_ct(a: &[u32], budget: &Budget) -> Result<Series> {
    let n = a.len();
    let spec = z_spec(n);
    let mut acc = Series::one(&spec).truncated(budget)?;
    for (j, &aj) in a.iter().enumerate() {
        if aj == 0 {
            continue;
        }
        let v = wilson_v(n, j + 1, budget)?;
        acc = acc.mul_capped(&v.powi(-(aj as i64), budget)?, Some(budget.bound))?;
    }
    acc.ct(&spec.vars().iter().map(String::as_str).collect::<Vec<_>>())
}

/// Default region for the Wilson checks.
pub fn wilson_region(n: usize, radius: i64) -> PrecisionBox {
    PrecisionBox::symmetric(radius, n)
}
