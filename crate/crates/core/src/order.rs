//! Exponent lattice, matrix-induced term orders and precision geometry.
//!
//! A [`FieldSpec`] names `N` variables and carries an integer matrix whose
//! row `i` is the image of the `i`-th unit exponent. Monomials are compared
//! by mapping their exponent through the matrix (the twisted exponent, here
//! an [`OrderKey`]) and reading the result reverse-lexicographically: the
//! last coordinate is the most significant one.
//!
//! The matrix may be `N x L` with `L >= N` as long as it has rank `N`. This
//! is what a residual field looks like after variables have been projected
//! out, and it also covers the homogenizing order used for non-diagonal
//! Lagrange inversion (an extra, never materialized, most significant
//! coordinate).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{MnError, Result};

/// A point of the exponent lattice `Z^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        ExponentVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        ExponentVector(self.0.iter().map(|&e| e * k).collect())
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        ExponentVector(v)
    }
}

impl Add for &ExponentVector {
    type Output = ExponentVector;
    fn add(self, rhs: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.len(), rhs.len());
        ExponentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ExponentVector {
    type Output = ExponentVector;
    fn sub(self, rhs: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.len(), rhs.len());
        ExponentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ExponentVector {
    type Output = ExponentVector;
    fn neg(self) -> ExponentVector {
        ExponentVector(self.0.iter().map(|a| -a).collect())
    }
}

/// Twisted exponent of a monomial. Ordered reverse-lexicographically, so a
/// `BTreeMap<OrderKey, _>` iterates terms from the initial term upwards.
///
/// Arithmetic saturates: `i64::MIN`/`i64::MAX` components are used as
/// unbounded sentinels in order floors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderKey(pub Vec<i64>);

impl OrderKey {
    pub fn zero(width: usize) -> Self {
        OrderKey(vec![0; width])
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &OrderKey) -> OrderKey {
        OrderKey(self.0.iter().zip(&other.0).map(|(a, b)| a.saturating_add(*b)).collect())
    }

    pub fn sub(&self, other: &OrderKey) -> OrderKey {
        OrderKey(self.0.iter().zip(&other.0).map(|(a, b)| a.saturating_sub(*b)).collect())
    }

    pub fn neg(&self) -> OrderKey {
        OrderKey(self.0.iter().map(|a| a.saturating_neg()).collect())
    }

    /// Keep only the listed columns.
    pub fn project(&self, cols: &[usize]) -> OrderKey {
        OrderKey(cols.iter().map(|&c| self.0[c]).collect())
    }
}

impl Ord for OrderKey {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for OrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Integer matrix whose row `i` is the twisted image of the `i`-th unit
/// exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderTwist {
    rows: Vec<Vec<i64>>,
}

impl OrderTwist {
    pub fn identity(n: usize) -> Self {
        OrderTwist { rows: (0..n).map(|i| ExponentVector::unit(n, i).0).collect() }
    }

    /// Builds a twist and checks that it is injective on `Z^N`.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(MnError::InvalidSpec("twist rows have different lengths".into()));
        }
        if width < rows.len() {
            return Err(MnError::InvalidSpec("twist has fewer columns than rows".into()));
        }
        if rank(&rows) != rows.len() {
            return Err(MnError::SingularTwist);
        }
        Ok(OrderTwist { rows })
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i]
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn is_identity(&self) -> bool {
        self.width() == self.nrows()
            && self.rows.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &v)| v == i64::from(i == j)))
    }
}

/// Variable names in significance order (last = most significant) plus the
/// order twist. Encodes a field of truncated series and its term order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    vars: Vec<String>,
    twist: OrderTwist,
}

impl FieldSpec {
    pub fn new(vars: Vec<String>, twist: OrderTwist) -> Result<Self> {
        if vars.is_empty() {
            return Err(MnError::InvalidSpec("at least one variable is required".into()));
        }
        Self::new_unchecked_len(vars, twist)
    }

    fn new_unchecked_len(vars: Vec<String>, twist: OrderTwist) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(MnError::InvalidSpec(format!("duplicate variable `{v}`")));
            }
        }
        if twist.nrows() != vars.len() {
            return Err(MnError::InvalidSpec(format!(
                "twist has {} rows for {} variables",
                twist.nrows(),
                vars.len()
            )));
        }
        Ok(FieldSpec { vars, twist })
    }

    pub fn identity<S: AsRef<str>>(vars: &[S]) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        let n = vars.len();
        Self::new(vars, OrderTwist::identity(n))
    }

    pub fn with_twist<S: AsRef<str>>(vars: &[S], rows: Vec<Vec<i64>>) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        Self::new(vars, OrderTwist::new(rows)?)
    }

    /// The field with no variables; coefficients of full residues live here.
    pub fn scalar() -> Self {
        FieldSpec { vars: Vec::new(), twist: OrderTwist { rows: Vec::new() } }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn twist(&self) -> &OrderTwist {
        &self.twist
    }

    /// Number of twisted coordinates.
    pub fn width(&self) -> usize {
        self.twist.width()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| MnError::UnknownVariable(name.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    /// Twisted exponent `sum_i k_i * row_i`.
    pub fn phi(&self, k: &ExponentVector) -> OrderKey {
        debug_assert_eq!(k.len(), self.nvars());
        let mut out = vec![0i64; self.width()];
        for (ki, row) in k.0.iter().zip(&self.twist.rows) {
            if *ki != 0 {
                for (o, r) in out.iter_mut().zip(row) {
                    *o += ki * r;
                }
            }
        }
        OrderKey(out)
    }

    pub fn compare(&self, a: &ExponentVector, b: &ExponentVector) -> Ordering {
        self.phi(a).cmp(&self.phi(b))
    }

    /// Field of the coefficients left after projecting out `remove`.
    ///
    /// Rows of the removed variables are dropped, then every column that is
    /// zero in all remaining rows. Returns the residual spec and the kept
    /// column indices of the original twisted coordinates.
    pub fn residual(&self, remove: &[usize]) -> (FieldSpec, Vec<usize>) {
        let keep: Vec<usize> = (0..self.nvars()).filter(|i| !remove.contains(i)).collect();
        let cols: Vec<usize> =
            (0..self.width()).filter(|&c| keep.iter().any(|&r| self.twist.rows[r][c] != 0)).collect();
        let vars = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let rows = keep.iter().map(|&i| cols.iter().map(|&c| self.twist.rows[i][c]).collect()).collect();
        (FieldSpec { vars, twist: OrderTwist { rows } }, cols)
    }

    /// Spec text of the form `vars=x,y,t; twist=[[2,1,0],[1,2,0],[0,0,1]]`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vars = None;
        let mut twist = None;
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| MnError::InvalidSpec(format!("expected key=value, found `{part}`")))?;
            match key.trim() {
                "vars" => vars = Some(parse_var_list(value)?),
                "twist" => {
                    let rows: Vec<Vec<i64>> = serde_json::from_str(value.trim())
                        .map_err(|e| MnError::InvalidSpec(format!("bad twist matrix: {e}")))?;
                    twist = Some(rows);
                }
                other => return Err(MnError::InvalidSpec(format!("unknown key `{other}`"))),
            }
        }
        let vars = vars.ok_or_else(|| MnError::InvalidSpec("missing vars=".into()))?;
        match twist {
            Some(rows) => Self::with_twist(&vars, rows),
            None => Self::identity(&vars),
        }
    }
}

pub(crate) fn parse_var_list(value: &str) -> Result<Vec<String>> {
    let vars: Vec<String> = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    for v in &vars {
        let mut chars = v.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok || v == "exp" || v == "log" {
            return Err(MnError::InvalidSpec(format!("invalid variable name `{v}`")));
        }
    }
    Ok(vars)
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vars={}", self.vars.join(","))?;
        if !self.twist.is_identity() {
            let rows = serde_json::to_string(&self.twist.rows).map_err(|_| fmt::Error)?;
            write!(f, "; twist={rows}")?;
        }
        Ok(())
    }
}

/// Positive integer weights on twisted coordinates. Truncated series are
/// exact on every monomial whose weighted twisted degree is at most their
/// precision bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grading {
    weights: Vec<i64>,
}

impl Grading {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.iter().any(|&w| w <= 0) {
            return Err(MnError::InvalidSpec("grading weights must be positive".into()));
        }
        Ok(Grading { weights })
    }

    /// Weights `1, base, base^2, ...` from the least significant coordinate.
    /// For `base` large enough these are positive on any finite set of
    /// monomials that are greater than 1.
    pub fn geometric(base: i64, width: usize) -> Self {
        let mut w = 1i64;
        let weights = (0..width)
            .map(|_| {
                let cur = w;
                w = w.saturating_mul(base);
                cur
            })
            .collect();
        Grading { weights }
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight(&self, key: &OrderKey) -> i64 {
        let s: i128 = key.0.iter().zip(&self.weights).map(|(&k, &w)| k as i128 * w as i128).sum();
        s.clamp(i64::MIN as i128 / 4, i64::MAX as i128 / 4) as i64
    }

    pub fn project(&self, cols: &[usize]) -> Grading {
        Grading { weights: cols.iter().map(|&c| self.weights[c]).collect() }
    }
}

/// Per-coordinate closed intervals on twisted exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrecisionBox {
    bounds: Vec<(i64, i64)>,
}

pub const DEFAULT_BOX_RADIUS: i64 = 16;

impl PrecisionBox {
    pub fn new(bounds: Vec<(i64, i64)>) -> Result<Self> {
        if bounds.iter().any(|&(lo, hi)| lo > hi) {
            return Err(MnError::InvalidSpec("box has an empty interval".into()));
        }
        Ok(PrecisionBox { bounds })
    }

    /// `[-radius, radius]` on every coordinate.
    pub fn symmetric(radius: i64, width: usize) -> Self {
        PrecisionBox { bounds: vec![(-radius.abs(), radius.abs()); width] }
    }

    pub fn default_for(spec: &FieldSpec) -> Self {
        Self::symmetric(DEFAULT_BOX_RADIUS, spec.width())
    }

    pub fn bounds(&self) -> &[(i64, i64)] {
        &self.bounds
    }

    pub fn width(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, key: &OrderKey) -> bool {
        key.0.iter().zip(&self.bounds).all(|(&k, &(lo, hi))| lo <= k && k <= hi)
    }

    pub fn top(&self) -> OrderKey {
        OrderKey(self.bounds.iter().map(|b| b.1).collect())
    }

    /// True when `key` is beyond the top corner in the reverse-lex order on
    /// the most significant coordinate where they differ; such keys are never
    /// inside the box.
    pub fn exceeds_top(&self, key: &OrderKey) -> bool {
        for (k, &(_, hi)) in key.0.iter().zip(&self.bounds).rev() {
            if *k != hi {
                return *k > hi;
            }
        }
        false
    }

    /// Largest weighted degree over the box.
    pub fn max_weight(&self, grading: &Grading) -> i64 {
        grading.weight(&self.top())
    }

    /// Sub-box on which a series with precision `bound` is guaranteed exact,
    /// obtained by lowering upper bounds from the most significant coordinate
    /// down. `None` when nothing of the box is covered.
    pub fn guaranteed(&self, grading: &Grading, bound: i64) -> Option<PrecisionBox> {
        let mut bounds = self.bounds.clone();
        let mut excess = self.max_weight(grading) - bound;
        for j in (0..bounds.len()).rev() {
            if excess <= 0 {
                break;
            }
            let w = grading.weights[j];
            let room = bounds[j].1 - bounds[j].0;
            let steps = ((excess + w - 1) / w).min(room);
            bounds[j].1 -= steps;
            excess -= steps * w;
        }
        (excess <= 0).then_some(PrecisionBox { bounds })
    }

    pub fn project(&self, cols: &[usize]) -> PrecisionBox {
        PrecisionBox { bounds: cols.iter().map(|&c| self.bounds[c]).collect() }
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Row rank of an integer matrix.
pub fn rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            if a[i][c] != 0 {
                let (f, g) = (a[r][c], a[i][c]);
                let pivot = a[r].clone();
                for (v, &pv) in a[i].iter_mut().zip(&pivot).skip(c) {
                    *v = *v * f - pv * g;
                }
                let d = a[i].iter().fold(0i128, |acc, &v| gcd(acc, v));
                if d > 1 {
                    a[i].iter_mut().for_each(|v| *v /= d);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Spec of the field in which the substituted variables take the role of
/// the new variables: row `i` of every substituted variable becomes the
/// twisted image of the exponent of its initial monomial, other rows stay.
///
/// `initial` pairs a variable index with the full exponent vector of the
/// initial monomial of its replacement series.
pub fn transformed_spec(base: &FieldSpec, initial: &[(usize, ExponentVector)]) -> Result<FieldSpec> {
    let xs: Vec<usize> = initial.iter().map(|(i, _)| *i).collect();
    let block: Vec<Vec<i64>> = initial.iter().map(|(_, e)| xs.iter().map(|&j| e.0[j]).collect()).collect();
    if determinant(&block) == 0 {
        return Err(MnError::SingularTwist);
    }
    let mut rows = base.twist.rows.clone();
    for (i, e) in initial {
        rows[*i] = base.phi(e).0;
    }
    FieldSpec::new_unchecked_len(base.vars.clone(), OrderTwist::new(rows)?)
}
