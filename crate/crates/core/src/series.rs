//! Truncated series over a [`FieldSpec`] and their field arithmetic.
//!
//! A [`Series`] is either exact (a Laurent polynomial) or truncated. A
//! truncated series carries a [`Grading`] and a precision bound `D`: every
//! monomial whose weighted twisted degree is at most `D` has its correct
//! coefficient, and every monomial of the true series that is not stored
//! lies at weight above `D` and at or above an order floor. The floor is what
//! certifies initial terms: the least stored term is the true initial term
//! exactly when it is not above the floor.
//!
//! Geometric sums and power-series compositions terminate because the
//! grading is required to be positive on their argument; the weights of the
//! powers then leave `{weight <= D}` after finitely many steps.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::coeff::{self, Coefficient};
use crate::error::{MnError, Result};
use crate::kernel::{self, WeightedTerm};
use crate::order::{ExponentVector, FieldSpec, Grading, OrderKey, PrecisionBox};

/// A monomial with nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Coefficient,
    pub exponent: ExponentVector,
}

/// Grading and precision bound requested for truncated results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub grading: Grading,
    pub bound: i64,
}

impl Budget {
    pub fn new(grading: Grading, bound: i64) -> Self {
        Budget { grading, bound }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    exp: ExponentVector,
    coeff: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Truncation {
    grading: Grading,
    bound: i64,
    /// Lower bound (in the term order) of every unstored term; `None` means
    /// nothing is missing below the known region.
    floor: Option<OrderKey>,
}

#[derive(Debug, Clone)]
pub struct Series {
    spec: Arc<FieldSpec>,
    terms: BTreeMap<OrderKey, Entry>,
    trunc: Option<Truncation>,
}

fn min_key(a: Option<OrderKey>, b: Option<OrderKey>) -> Option<OrderKey> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

impl Series {
    // ---- construction ----------------------------------------------------

    pub fn zero(spec: &Arc<FieldSpec>) -> Series {
        Series { spec: spec.clone(), terms: BTreeMap::new(), trunc: None }
    }

    pub fn constant(spec: &Arc<FieldSpec>, c: Coefficient) -> Series {
        Series::monomial(spec, c, ExponentVector::zero(spec.nvars()))
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Series {
        Series::constant(spec, Coefficient::one())
    }

    pub fn monomial(spec: &Arc<FieldSpec>, c: Coefficient, exp: ExponentVector) -> Series {
        Series::from_terms(spec, [(exp, c)])
    }

    pub fn variable(spec: &Arc<FieldSpec>, name: &str) -> Result<Series> {
        let i = spec.index_of(name)?;
        Ok(Series::monomial(spec, Coefficient::one(), ExponentVector::unit(spec.nvars(), i)))
    }

    /// Exact series from a list of terms; repeated exponents are summed.
    pub fn from_terms<I>(spec: &Arc<FieldSpec>, terms: I) -> Series
    where
        I: IntoIterator<Item = (ExponentVector, Coefficient)>,
    {
        let mut map: BTreeMap<OrderKey, Entry> = BTreeMap::new();
        for (exp, coeff) in terms {
            assert_eq!(exp.len(), spec.nvars(), "exponent length does not match the field");
            let key = spec.phi(&exp);
            match map.get_mut(&key) {
                Some(e) => e.coeff += coeff,
                None => {
                    map.insert(key, Entry { exp, coeff });
                }
            }
        }
        map.retain(|_, e| !e.coeff.is_zero());
        Series { spec: spec.clone(), terms: map, trunc: None }
    }

    /// Re-reads the terms of `self` in another field over the same variables.
    pub fn reinterpret(&self, spec: &Arc<FieldSpec>) -> Result<Series> {
        if !self.is_exact() {
            return Err(MnError::OutOfPrecision);
        }
        if spec.vars() != self.spec.vars() {
            return Err(MnError::SpecMismatch);
        }
        Ok(Series::from_terms(spec, self.terms.values().map(|e| (e.exp.clone(), e.coeff.clone()))))
    }

    /// Forget everything above `budget.bound`.
    pub fn truncated(&self, budget: &Budget) -> Result<Series> {
        let mut out = self.clone();
        match &mut out.trunc {
            None => {
                out.trunc = Some(Truncation { grading: budget.grading.clone(), bound: budget.bound, floor: None })
            }
            Some(t) => {
                if t.grading != budget.grading {
                    return Err(MnError::GradingMismatch);
                }
                t.bound = t.bound.min(budget.bound);
            }
        }
        out.prune();
        Ok(out)
    }

    // ---- inspection ------------------------------------------------------

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// Precision bound; `None` for exact series.
    pub fn precision(&self) -> Option<i64> {
        self.trunc.as_ref().map(|t| t.bound)
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.trunc.as_ref().map(|t| &t.grading)
    }

    /// True for the exact zero series.
    pub fn is_zero(&self) -> bool {
        self.is_exact() && self.terms.is_empty()
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stored terms in increasing term order.
    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.values().map(|e| Term { coeff: e.coeff.clone(), exponent: e.exp.clone() })
    }

    fn guaranteed_key(&self, key: &OrderKey) -> bool {
        match &self.trunc {
            None => true,
            Some(t) => t.grading.weight(key) <= t.bound,
        }
    }

    /// Coefficient of `x^exp`, if it lies in the guaranteed region.
    pub fn coefficient(&self, exp: &ExponentVector) -> Result<Coefficient> {
        let key = self.spec.phi(exp);
        if !self.guaranteed_key(&key) {
            return Err(MnError::OutOfPrecision);
        }
        Ok(self.terms.get(&key).map_or_else(Coefficient::zero, |e| e.coeff.clone()))
    }

    /// Largest sub-box of `region` on which the stored coefficients are exact.
    pub fn guaranteed_box(&self, region: &PrecisionBox) -> Option<PrecisionBox> {
        match &self.trunc {
            None => Some(region.clone()),
            Some(t) => region.guaranteed(&t.grading, t.bound),
        }
    }

    /// Terms whose twisted exponent lies in `region`; fails unless the whole
    /// region is guaranteed.
    pub fn terms_in(&self, region: &PrecisionBox) -> Result<Vec<Term>> {
        if region.width() != self.spec.width() {
            return Err(MnError::InvalidSpec(format!(
                "box has {} coordinates, field has {}",
                region.width(),
                self.spec.width()
            )));
        }
        if self.guaranteed_box(region).as_ref() != Some(region) {
            return Err(MnError::OutOfPrecision);
        }
        Ok(self
            .terms
            .iter()
            .filter(|(k, _)| region.contains(k))
            .map(|(_, e)| Term { coeff: e.coeff.clone(), exponent: e.exp.clone() })
            .collect())
    }

    /// Equality of all coefficients inside `region`.
    pub fn agrees_on(&self, other: &Series, region: &PrecisionBox) -> Result<bool> {
        if self.spec != other.spec {
            return Err(MnError::SpecMismatch);
        }
        Ok(self.terms_in(region)? == other.terms_in(region)?)
    }

    /// Least term in the known region, certified to be the initial term of
    /// the full series.
    pub fn initial_term(&self) -> Result<Term> {
        let (key, e) = match self.terms.iter().next() {
            Some(first) => first,
            None if self.is_exact() => return Err(MnError::ZeroSeries),
            None => return Err(MnError::IndeterminateInitialTerm),
        };
        if let Some(Truncation { floor: Some(floor), .. }) = &self.trunc {
            if key > floor {
                return Err(MnError::IndeterminateInitialTerm);
            }
        }
        Ok(Term { coeff: e.coeff.clone(), exponent: e.exp.clone() })
    }

    /// Sign of the order of the series relative to the zero exponent.
    pub fn order_sign(&self) -> Result<Ordering> {
        let t = self.initial_term()?;
        Ok(self.spec.phi(&t.exponent).cmp(&OrderKey::zero(self.spec.width())))
    }

    // ---- internal bookkeeping -------------------------------------------

    /// Lower bound of the whole support: min(first stored key, floor).
    fn support_floor(&self) -> Option<OrderKey> {
        let first = self.terms.keys().next().cloned();
        let floor = self.trunc.as_ref().and_then(|t| t.floor.clone());
        min_key(first, floor)
    }

    /// Lower bound on the weight of every term of the full series.
    fn min_weight(&self, grading: &Grading) -> Option<i64> {
        let known = self.terms.keys().map(|k| grading.weight(k)).min();
        match &self.trunc {
            None => known,
            Some(t) => Some(known.map_or(t.bound.saturating_add(1), |k| k.min(t.bound.saturating_add(1)))),
        }
    }

    fn prune(&mut self) {
        let Some(t) = &mut self.trunc else { return };
        let mut removed: Option<OrderKey> = None;
        let g = &t.grading;
        let bound = t.bound;
        self.terms.retain(|k, _| {
            let keep = g.weight(k) <= bound;
            if !keep && removed.as_ref().is_none_or(|r| k < r) {
                removed = Some(k.clone());
            }
            keep
        });
        t.floor = min_key(t.floor.take(), removed);
    }

    fn check_compatible(&self, other: &Series) -> Result<Option<Grading>> {
        if self.spec != other.spec {
            return Err(MnError::SpecMismatch);
        }
        match (&self.trunc, &other.trunc) {
            (Some(a), Some(b)) if a.grading != b.grading => Err(MnError::GradingMismatch),
            (Some(a), _) => Ok(Some(a.grading.clone())),
            (_, Some(b)) => Ok(Some(b.grading.clone())),
            (None, None) => Ok(None),
        }
    }

    fn weighted(&self, grading: Option<&Grading>) -> Vec<WeightedTerm> {
        let mut v: Vec<WeightedTerm> = self
            .terms
            .iter()
            .map(|(k, e)| WeightedTerm {
                weight: grading.map_or(0, |g| g.weight(k)),
                key: k.clone(),
                exp: e.exp.clone(),
                coeff: e.coeff.clone(),
            })
            .collect();
        v.sort_by_key(|t| t.weight);
        v
    }

    // ---- ring operations -------------------------------------------------

    pub fn add(&self, other: &Series) -> Result<Series> {
        let grading = self.check_compatible(other)?;
        let mut terms = self.terms.clone();
        for (k, e) in &other.terms {
            match terms.get_mut(k) {
                Some(slot) => slot.coeff += &e.coeff,
                None => {
                    terms.insert(k.clone(), e.clone());
                }
            }
        }
        terms.retain(|_, e| !e.coeff.is_zero());
        let trunc = grading.map(|grading| {
            let bound = self.precision().unwrap_or(i64::MAX).min(other.precision().unwrap_or(i64::MAX));
            let fa = self.trunc.as_ref().and_then(|t| t.floor.clone());
            let fb = other.trunc.as_ref().and_then(|t| t.floor.clone());
            Truncation { grading, bound, floor: min_key(fa, fb) }
        });
        let mut out = Series { spec: self.spec.clone(), terms, trunc };
        out.prune();
        Ok(out)
    }

    pub fn neg(&self) -> Series {
        let mut out = self.clone();
        for e in out.terms.values_mut() {
            e.coeff = -e.coeff.clone();
        }
        out
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Coefficient) -> Series {
        if c.is_zero() {
            return match &self.trunc {
                None => Series::zero(&self.spec),
                Some(_) => {
                    let mut z = self.clone();
                    z.terms.clear();
                    if let Some(t) = &mut z.trunc {
                        t.floor = None;
                    }
                    z
                }
            };
        }
        let mut out = self.clone();
        for e in out.terms.values_mut() {
            e.coeff *= c;
        }
        out
    }

    /// Multiplication by the monomial `c * x^exp`; never loses precision.
    pub fn mul_monomial(&self, c: &Coefficient, exp: &ExponentVector) -> Series {
        if c.is_zero() {
            return self.scale(c);
        }
        let shift = self.spec.phi(exp);
        let terms = self
            .terms
            .iter()
            .map(|(k, e)| (k.add(&shift), Entry { exp: &e.exp + exp, coeff: &e.coeff * c }))
            .collect();
        let trunc = self.trunc.as_ref().map(|t| Truncation {
            grading: t.grading.clone(),
            bound: t.bound.saturating_add(t.grading.weight(&shift)),
            floor: t.floor.as_ref().map(|f| f.add(&shift)),
        });
        Series { spec: self.spec.clone(), terms, trunc }
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.mul_capped(other, None)
    }

    /// Product, additionally truncated at `cap` when either factor is
    /// truncated. Two exact factors always give the exact product.
    pub fn mul_capped(&self, other: &Series, cap: Option<i64>) -> Result<Series> {
        let grading = self.check_compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Series::zero(&self.spec));
        }
        let Some(grading) = grading else {
            let a = self.weighted(None);
            let b = other.weighted(None);
            let acc = kernel::convolve(&a, &b, i64::MAX);
            return Ok(self.with_accumulator(acc, None));
        };
        let va = self.min_weight(&grading).unwrap_or(0);
        let vb = other.min_weight(&grading).unwrap_or(0);
        let da = self.precision().unwrap_or(i64::MAX);
        let db = other.precision().unwrap_or(i64::MAX);
        let bound = da.saturating_add(vb).min(db.saturating_add(va)).min(cap.unwrap_or(i64::MAX));

        let a = self.weighted(Some(&grading));
        let b = other.weighted(Some(&grading));
        let acc = kernel::convolve(&a, &b, bound);

        let lo_a = self.support_floor();
        let lo_b = other.support_floor();
        let fa = self.trunc.as_ref().and_then(|t| t.floor.clone());
        let fb = other.trunc.as_ref().and_then(|t| t.floor.clone());
        let mut floor = min_key(
            fa.and_then(|f| lo_b.as_ref().map(|l| f.add(l))),
            fb.and_then(|f| lo_a.as_ref().map(|l| f.add(l))),
        );
        floor = min_key(floor, dropped_floor(&a, &b, bound));
        let trunc = Truncation { grading, bound, floor };
        let mut out = self.with_accumulator(acc, Some(trunc));
        out.prune();
        Ok(out)
    }

    fn with_accumulator(&self, acc: kernel::Accumulator, trunc: Option<Truncation>) -> Series {
        let terms = acc.into_iter().map(|(k, (exp, coeff))| (k, Entry { exp, coeff })).collect();
        Series { spec: self.spec.clone(), terms, trunc }
    }

    /// Nonnegative integer power.
    pub fn pow(&self, k: u32, cap: Option<i64>) -> Result<Series> {
        let mut result = Series::one(&self.spec);
        if let Some(t) = &self.trunc {
            result = result.truncated(&Budget::new(t.grading.clone(), cap.unwrap_or(i64::MAX)))?;
        }
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_capped(&base, cap)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_capped(&base, cap)?;
            }
        }
        Ok(result)
    }

    /// Integer power; negative exponents go through [`Series::invert`].
    pub fn powi(&self, k: i64, budget: &Budget) -> Result<Series> {
        let e = u32::try_from(k.unsigned_abs()).map_err(|_| MnError::Usage("exponent too large".into()))?;
        if k >= 0 {
            let cap = (!self.is_exact()).then_some(budget.bound);
            self.pow(e, cap)
        } else {
            let inv = self.invert(budget)?;
            let cap = (!inv.is_exact()).then_some(budget.bound);
            inv.pow(e, cap)
        }
    }

    // ---- field operations ------------------------------------------------

    /// Multiplicative inverse `c^-1 m^-1 sum_n tau^n` where `c*m` is the
    /// initial term and `self = c*m*(1 - tau)`.
    pub fn invert(&self, budget: &Budget) -> Result<Series> {
        if self.is_zero() {
            return Err(MnError::ZeroDivisor);
        }
        let init = self.initial_term()?;
        let cinv = init.coeff.recip();
        let minv = -&init.exponent;
        if self.is_exact() && self.terms.len() == 1 {
            return Ok(Series::monomial(&self.spec, cinv, minv));
        }
        let grading = match &self.trunc {
            Some(t) if t.grading != budget.grading => return Err(MnError::GradingMismatch),
            _ => budget.grading.clone(),
        };
        // tau = 1 - self / (c m)
        let normalized = self.mul_monomial(&cinv, &minv);
        let tau = Series::one(&self.spec).sub(&normalized)?;
        let shift = grading.weight(&self.spec.phi(&init.exponent));
        let inner = Budget::new(grading.clone(), budget.bound.saturating_add(shift));
        let sum = tau.geometric(&inner)?;
        Ok(sum.mul_monomial(&cinv, &minv))
    }

    /// `sum_n self^n` for a series of positive order.
    fn geometric(&self, budget: &Budget) -> Result<Series> {
        let stream = |_n: usize| Coefficient::one();
        self.compose_univariate(stream, budget)
    }

    /// `sum_n b_n self^n` for a series of positive order, where `b_n` is
    /// produced by `stream`.
    /// `stream` is called with `n = 0, 1, 2, ...` in order.
    pub fn compose_univariate<F>(&self, mut stream: F, budget: &Budget) -> Result<Series>
    where
        F: FnMut(usize) -> Coefficient,
    {
        let b0 = Series::constant(&self.spec, stream(0));
        if self.is_zero() {
            return Ok(b0);
        }
        if self.order_sign()? != Ordering::Greater {
            return Err(MnError::NonpositiveOrder);
        }
        if self.terms.keys().any(|k| budget.grading.weight(k) <= 0) {
            return Err(MnError::WeightNotPositive);
        }
        let arg = self.truncated(budget)?;
        if arg.precision().is_some_and(|d| d < 0) && !self.is_exact() {
            // unknown terms might have nonpositive weight
            return Err(MnError::OutOfPrecision);
        }
        let grading = budget.grading.clone();
        let cap = arg.precision();
        let mut result = b0.truncated(&Budget::new(grading.clone(), cap.unwrap_or(budget.bound)))?;
        let mut power = Series::one(&self.spec).truncated(&Budget::new(grading, cap.unwrap_or(budget.bound)))?;
        let mut n = 1usize;
        loop {
            power = power.mul_capped(&arg, cap)?;
            if power.terms.is_empty() {
                // the tail is unstored; its floor is already in `power`
                result = result.add(&power)?;
                break;
            }
            let bn = stream(n);
            if !bn.is_zero() {
                result = result.add(&power.scale(&bn))?;
            }
            n += 1;
        }
        Ok(result)
    }

    pub fn exp_of(&self, budget: &Budget) -> Result<Series> {
        let mut current = Coefficient::one();
        self.compose_univariate(
            |n| {
                if n > 0 {
                    current /= coeff::int(n as i64);
                }
                current.clone()
            },
            budget,
        )
    }

    pub fn log_of(&self, budget: &Budget) -> Result<Series> {
        let init = self.initial_term().map_err(|e| match e {
            MnError::ZeroSeries => MnError::BadInitialTerm,
            e => e,
        })?;
        if !init.exponent.is_zero() || !init.coeff.is_one() {
            return Err(MnError::BadInitialTerm);
        }
        let u = self.sub(&Series::one(&self.spec))?;
        u.compose_univariate(
            |n| {
                if n == 0 {
                    Coefficient::zero()
                } else {
                    let s = if n % 2 == 1 { 1 } else { -1 };
                    coeff::ratio(s, n as i64)
                }
            },
            budget,
        )
    }

    // ---- calculus --------------------------------------------------------

    /// Termwise `d/dx_i`.
    pub fn derivative(&self, var: &str) -> Result<Series> {
        let i = self.spec.index_of(var)?;
        Ok(self.derivative_at(i))
    }

    pub(crate) fn derivative_at(&self, i: usize) -> Series {
        let unit = ExponentVector::unit(self.spec.nvars(), i);
        let shift = self.spec.phi(&unit);
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e.exp.0[i] != 0)
            .map(|(k, e)| {
                let c = &e.coeff * coeff::int(e.exp.0[i]);
                (k.sub(&shift), Entry { exp: &e.exp - &unit, coeff: c })
            })
            .collect();
        let trunc = self.trunc.as_ref().map(|t| Truncation {
            grading: t.grading.clone(),
            bound: t.bound.saturating_sub(t.grading.weight(&shift)),
            floor: t.floor.as_ref().map(|f| f.sub(&shift)),
        });
        Series { spec: self.spec.clone(), terms, trunc }
    }

    /// Coefficient of `prod_j x_{vars[j]}^{exps[j]}`, as a series in the
    /// remaining variables.
    pub fn coefficient_at(&self, vars: &[usize], exps: &[i64]) -> Series {
        assert_eq!(vars.len(), exps.len());
        let (residual, cols) = self.spec.residual(vars);
        let residual = Arc::new(residual);
        let mut full = vec![0i64; self.spec.nvars()];
        for (&v, &e) in vars.iter().zip(exps) {
            full[v] = e;
        }
        let shift = self.spec.phi(&ExponentVector(full));
        let keep: Vec<usize> = (0..self.spec.nvars()).filter(|i| !vars.contains(i)).collect();
        let terms = self
            .terms
            .values()
            .filter(|e| vars.iter().zip(exps).all(|(&v, &x)| e.exp.0[v] == x))
            .map(|e| {
                let exp = ExponentVector(keep.iter().map(|&i| e.exp.0[i]).collect());
                (residual.phi(&exp), Entry { exp, coeff: e.coeff.clone() })
            })
            .collect();
        let trunc = self.trunc.as_ref().map(|t| Truncation {
            grading: t.grading.project(&cols),
            bound: t.bound.saturating_sub(t.grading.weight(&shift)),
            floor: t.floor.as_ref().map(|f| project_floor(&f.sub(&shift), &cols)),
        });
        Series { spec: residual, terms, trunc }
    }

    pub fn ct(&self, vars: &[&str]) -> Result<Series> {
        let idx = self.spec.indices_of(vars)?;
        Ok(self.coefficient_at(&idx, &vec![0; idx.len()]))
    }

    pub fn res(&self, vars: &[&str]) -> Result<Series> {
        let idx = self.spec.indices_of(vars)?;
        Ok(self.coefficient_at(&idx, &vec![-1; idx.len()]))
    }

    /// The `x`-term of least order: its `x`-exponent, its coefficient as a
    /// series in the other variables, and the initial monomial of the whole
    /// series.
    pub fn x_initial_term(&self, xvars: &[usize]) -> Result<XInitialTerm> {
        let leading = self.initial_term()?;
        let x_exponent: Vec<i64> = xvars.iter().map(|&i| leading.exponent.0[i]).collect();
        let coefficient = self.coefficient_at(xvars, &x_exponent);
        Ok(XInitialTerm { x_exponent, coefficient, leading })
    }

    /// Scalar value of a series over the empty field.
    pub fn scalar_value(&self) -> Result<Coefficient> {
        if self.spec.nvars() != 0 {
            return Err(MnError::SpecMismatch);
        }
        self.coefficient(&ExponentVector(Vec::new()))
    }
}

/// Least key among the products `x * y` with `weight(x) + weight(y) > bound`.
/// Both inputs are sorted by weight.
fn dropped_floor(a: &[WeightedTerm], b: &[WeightedTerm], bound: i64) -> Option<OrderKey> {
    let mut suffix_min: Vec<OrderKey> = Vec::with_capacity(b.len());
    for t in b.iter().rev() {
        let next = match suffix_min.last() {
            Some(m) if m < &t.key => m.clone(),
            _ => t.key.clone(),
        };
        suffix_min.push(next);
    }
    suffix_min.reverse();
    let mut best: Option<OrderKey> = None;
    for x in a {
        let j = b.partition_point(|y| x.weight.saturating_add(y.weight) <= bound);
        if j < b.len() {
            best = min_key(best, Some(x.key.add(&suffix_min[j])));
        }
    }
    best
}

/// Translate an order floor on full twisted keys into one on residual keys,
/// where the dropped columns are identically zero.
fn project_floor(c: &OrderKey, cols: &[usize]) -> OrderKey {
    let width = c.width();
    let mut out = vec![0i64; cols.len()];
    let mut fill: Option<i64> = None;
    for j in (0..width).rev() {
        match cols.iter().position(|&k| k == j) {
            Some(pos) => out[pos] = fill.unwrap_or(c.0[j]),
            None if fill.is_none() => match c.0[j].cmp(&0) {
                Ordering::Less => fill = Some(i64::MIN),
                Ordering::Greater => fill = Some(i64::MAX),
                Ordering::Equal => {}
            },
            None => {}
        }
    }
    OrderKey(out)
}

/// Result of [`Series::x_initial_term`].
#[derive(Debug, Clone)]
pub struct XInitialTerm {
    pub x_exponent: Vec<i64>,
    pub coefficient: Series,
    pub leading: Term,
}

impl PartialEq for Series {
    /// Representational equality: same field, same truncation, same terms.
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
            && self.trunc == other.trunc
            && self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|((k1, e1), (k2, e2))| k1 == k2 && e1.coeff == e2.coeff)
    }
}

/// Human-readable sum of terms, e.g. `3 + 6*t + 12*t^2 + O(..)`.
pub fn format_terms(spec: &FieldSpec, terms: &[Term]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let neg = t.coeff.is_negative();
        let abs = t.coeff.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono: Vec<String> = spec
            .vars()
            .iter()
            .zip(&t.exponent.0)
            .filter(|(_, &e)| e != 0)
            .map(|(v, &e)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        if mono.is_empty() {
            out.push_str(&coeff::format(&abs));
        } else {
            if !abs.is_one() {
                out.push_str(&coeff::format(&abs));
                out.push('*');
            }
            out.push_str(&mono.join("*"));
        }
    }
    out
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<Term> = self.terms().collect();
        write!(f, "{}", format_terms(&self.spec, &terms))?;
        if !self.is_exact() {
            write!(f, " + ...")?;
        }
        Ok(())
    }
}
