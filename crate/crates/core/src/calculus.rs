//! Jacobians, changes of variables and the residue theorem, plus Lagrange
//! inversion built on top of them.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::coeff::{self, Coefficient};
use crate::driver::{Driver, Embedded};
use crate::error::{MnError, Result};
use crate::expr::{expand, Expr, Scope};
use crate::order::{determinant, transformed_spec, ExponentVector, FieldSpec, Grading, PrecisionBox};
use crate::series::{Budget, Series, Term};

// ---- jacobians ---------------------------------------------------------------

/// Determinant of a square matrix of series by cofactor expansion along the
/// first row.
pub fn determinant_series(m: &[Vec<Series>]) -> Result<Series> {
    let n = m.len();
    match n {
        0 => return Err(MnError::Usage("empty matrix".into())),
        1 => return Ok(m[0][0].clone()),
        _ => {}
    }
    let mut acc: Option<Series> = None;
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Series>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, s)| s.clone()).collect()).collect();
        let mut term = entry.mul(&determinant_series(&minor)?)?;
        if j % 2 == 1 {
            term = term.neg();
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.unwrap_or_else(|| Series::zero(m[0][0].spec())))
}

fn check_square(fs: &[Series], xvars: &[usize]) -> Result<()> {
    if fs.len() != xvars.len() || fs.is_empty() {
        return Err(MnError::Usage(format!("{} functions for {} variables", fs.len(), xvars.len())));
    }
    let spec = fs[0].spec();
    if fs.iter().any(|f| f.spec() != spec) {
        return Err(MnError::SpecMismatch);
    }
    Ok(())
}

/// `det(dF_i/dx_j)`.
pub fn jacobian(fs: &[Series], xvars: &[usize]) -> Result<Series> {
    check_square(fs, xvars)?;
    let m: Vec<Vec<Series>> = fs.iter().map(|f| xvars.iter().map(|&x| f.derivative_at(x)).collect()).collect();
    determinant_series(&m)
}

/// Exponent matrix of the initial monomials restricted to `xvars`, and its
/// determinant.
pub fn jacobian_number(fs: &[Series], xvars: &[usize]) -> Result<i64> {
    check_square(fs, xvars)?;
    let rows = fs
        .iter()
        .map(|f| {
            let e = f.initial_term()?.exponent;
            Ok(xvars.iter().map(|&x| e.0[x]).collect())
        })
        .collect::<Result<Vec<Vec<i64>>>>()?;
    Ok(determinant(&rows) as i64)
}

/// `(x_1 ... x_n) / (F_1 ... F_n) * J(F)`.
pub fn log_jacobian(fs: &[Series], xvars: &[usize], budget: &Budget) -> Result<Series> {
    let mut out = jacobian(fs, xvars)?;
    let spec = fs[0].spec().clone();
    for (f, &x) in fs.iter().zip(xvars) {
        let ratio = f.invert(budget)?.mul_monomial(&Coefficient::one(), &ExponentVector::unit(spec.nvars(), x));
        out = out.mul_capped(&ratio, Some(budget.bound))?;
    }
    Ok(out)
}

/// Substitutes `gs[j]` for the `j`-th variable of `h`, an exact Laurent
/// polynomial over the same variable list.
pub fn compose(h: &Series, gs: &[Series], budget: &Budget) -> Result<Series> {
    if !h.is_exact() {
        return Err(MnError::OutOfPrecision);
    }
    let spec = gs.first().map(|g| g.spec().clone()).ok_or_else(|| MnError::Usage("nothing to substitute".into()))?;
    let mut acc = Series::zero(&spec);
    let mut powers: HashMap<(usize, i64), Series> = HashMap::new();
    for t in h.terms() {
        let mut term = Series::constant(&spec, t.coeff.clone());
        for (j, &e) in t.exponent.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if let std::collections::hash_map::Entry::Vacant(slot) = powers.entry((j, e)) {
                slot.insert(gs[j].powi(e, budget)?);
            }
            let p = &powers[&(j, e)];
            let cap = (!term.is_exact() || !p.is_exact()).then_some(budget.bound);
            term = term.mul_capped(p, cap)?;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

// ---- change of variables -------------------------------------------------------

/// Which side of the residue theorem to evaluate: the residue form or the
/// constant-term form with the log Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Residue,
    ConstantTerm,
}

/// A substitution `x_i -> F_i` together with its initial data.
#[derive(Debug, Clone)]
pub struct ChangeOfVariables {
    pub base: Arc<FieldSpec>,
    pub xvars: Vec<usize>,
    pub exprs: Vec<Expr>,
    pub scope: Scope,
    /// Initial monomial of each `F_i` in the base field.
    pub initial: Vec<Term>,
    pub jnum: i64,
    /// Field in which the `F_i` play the role of the variables; `None` when
    /// the jacobian number vanishes.
    pub target: Option<Arc<FieldSpec>>,
}

impl ChangeOfVariables {
    pub fn new(
        base: &Arc<FieldSpec>,
        xvars: &[&str],
        exprs: Vec<Expr>,
        scope: Scope,
        driver: &Driver,
    ) -> Result<ChangeOfVariables> {
        let xs = base.indices_of(xvars)?;
        if exprs.len() != xs.len() {
            return Err(MnError::Usage(format!("{} substitutions for {} variables", exprs.len(), xs.len())));
        }
        let mut initial = Vec::new();
        for e in &exprs {
            let s = driver.run(base.width(), &|_: &Grading| 0, |b| {
                let s = expand(e, base, b, &scope)?;
                s.initial_term()?;
                Ok(s)
            })?;
            initial.push(s.initial_term()?);
        }
        let block: Vec<Vec<i64>> = initial.iter().map(|t| xs.iter().map(|&x| t.exponent.0[x]).collect()).collect();
        let jnum = determinant(&block) as i64;
        let target = if jnum == 0 {
            None
        } else {
            let pairs: Vec<(usize, ExponentVector)> = xs.iter().copied().zip(initial.iter().map(|t| t.exponent.clone())).collect();
            Some(Arc::new(transformed_spec(base, &pairs)?))
        };
        Ok(ChangeOfVariables { base: base.clone(), xvars: xs, exprs, scope, initial, jnum, target })
    }

    fn x_names(&self) -> Vec<&str> {
        self.xvars.iter().map(|&i| self.base.vars()[i].as_str()).collect()
    }

    /// The `F_i` expanded in the base field.
    pub fn expand_fs(&self, budget: &Budget) -> Result<Vec<Series>> {
        self.exprs.iter().map(|e| expand(e, &self.base, budget, &self.scope)).collect()
    }

    fn extraction(&self, spec: &FieldSpec, form: Form, region: &PrecisionBox) -> Embedded {
        let (_, cols) = spec.residual(&self.xvars);
        let mut exp = vec![0i64; spec.nvars()];
        if form == Form::Residue {
            for &x in &self.xvars {
                exp[x] = -1;
            }
        }
        Embedded { region: region.project(&cols), cols, shift: spec.phi(&ExponentVector(exp)) }
    }

    fn extract(&self, s: &Series, form: Form) -> Series {
        let v = if form == Form::Residue { -1 } else { 0 };
        s.coefficient_at(&self.xvars, &vec![v; self.xvars.len()])
    }

    /// `Res_x phi(F) J(F)` (or `CT_x phi(F) LJ(F)`) in the base field.
    pub fn lhs(&self, phi: &Expr, form: Form, region: &PrecisionBox, driver: &Driver) -> Result<Series> {
        let target = self.extraction(&self.base, form, region);
        let s = driver.run(self.base.width(), &target, |b| {
            let fs = self.expand_fs(b)?;
            let mut scope = self.scope.clone();
            for (name, f) in self.x_names().into_iter().zip(&fs) {
                scope.series.insert(name.to_string(), f.clone());
            }
            let composed = expand(phi, &self.base, b, &scope)?;
            let jac = match form {
                Form::Residue => jacobian(&fs, &self.xvars)?,
                Form::ConstantTerm => log_jacobian(&fs, &self.xvars, b)?,
            };
            let cap = (!composed.is_exact() || !jac.is_exact()).then_some(b.bound);
            composed.mul_capped(&jac, cap)
        })?;
        Ok(self.extract(&s, form))
    }

    /// `Res_x phi(x)` (or `CT_x phi(x)`) in the target field, unscaled.
    pub fn target_side(&self, phi: &Expr, form: Form, region: &PrecisionBox, driver: &Driver) -> Result<Series> {
        let spec = self.target.as_ref().ok_or(MnError::RefusedSingular)?;
        let target = self.extraction(spec, form, region);
        let s = driver
            .run(spec.width(), &target, |b| expand(phi, spec, b, &self.scope))
            .map_err(|e| if e.is_usage() { e } else { MnError::ExpansionFailure(e.to_string()) })?;
        Ok(self.extract(&s, form))
    }

    /// Whether `phi` is a Laurent polynomial in the base field.
    fn is_laurent_polynomial(&self, phi: &Expr) -> Result<bool> {
        let b = Budget::new(Grading::geometric(2, self.base.width()), 0);
        match expand(phi, &self.base, &b, &self.scope) {
            Ok(s) => Ok(s.is_exact()),
            Err(e) if e.is_usage() => Err(e),
            Err(_) => Ok(false),
        }
    }

    /// Evaluates both sides of the residue theorem for `phi`, whose free
    /// variables are the names of the substituted variables.
    pub fn verify(&self, phi: &Expr, form: Form, region: &PrecisionBox, driver: &Driver) -> Result<ResidueVerdict> {
        let rhs = if self.jnum == 0 {
            if !self.is_laurent_polynomial(phi)? {
                return Err(MnError::RefusedSingular);
            }
            None
        } else {
            // the target-field expansion must exist before anything else is attempted
            Some(self.target_side(phi, form, region, driver)?.scale(&coeff::int(self.jnum)))
        };
        let lhs = self.lhs(phi, form, region, driver)?;
        let rhs = rhs.unwrap_or_else(|| Series::zero(lhs.spec()));
        let (_, cols) = self.base.residual(&self.xvars);
        let out_region = region.project(&cols);
        let equal = lhs.agrees_on(&rhs, &out_region)?;
        Ok(ResidueVerdict { lhs, rhs, jnum: self.jnum, equal, region: out_region })
    }
}

/// Both sides of the residue theorem on a common region.
#[derive(Debug, Clone)]
pub struct ResidueVerdict {
    pub lhs: Series,
    pub rhs: Series,
    pub jnum: i64,
    pub equal: bool,
    pub region: PrecisionBox,
}

// ---- lagrange inversion -------------------------------------------------------

/// Checks `F_i = x_i + (terms of total degree >= 2)` with nonnegative
/// exponents.
fn check_normalized(fs: &[Series]) -> Result<()> {
    let n = fs.first().map_or(0, |f| f.spec().nvars());
    if fs.len() != n {
        return Err(MnError::Usage(format!("{} functions for {n} variables", fs.len())));
    }
    for (i, f) in fs.iter().enumerate() {
        if !f.is_exact() {
            return Err(MnError::BadNormalization);
        }
        for t in f.terms() {
            let degree: i64 = t.exponent.0.iter().sum();
            let linear_ok = degree != 1 || (t.exponent.0[i] == 1 && t.coeff.is_one());
            if t.exponent.0.iter().any(|&e| e < 0) || degree < 1 || !linear_ok {
                return Err(MnError::BadNormalization);
            }
        }
        if f.coefficient(&ExponentVector::unit(n, i))? != coeff::int(1) {
            return Err(MnError::BadNormalization);
        }
    }
    Ok(())
}

/// Total-degree grading on an identity field.
fn degree_budget(spec: &FieldSpec, degree: i64) -> Budget {
    Budget::new(Grading::geometric(1, spec.width()), degree)
}

/// Compositional inverse `G` of `F` through total degree `degree`, by the
/// fixed-point iteration `G <- x - H(G)` where `F = x + H`.
pub fn lagrange_inverse(fs: &[Series], degree: i64) -> Result<Vec<Series>> {
    check_normalized(fs)?;
    let spec = fs[0].spec().clone();
    if !spec.twist().is_identity() {
        return Err(MnError::InvalidSpec("lagrange inversion needs the identity order".into()));
    }
    let budget = degree_budget(&spec, degree);
    let n = spec.nvars();
    let xs: Vec<Series> = (0..n)
        .map(|i| Series::monomial(&spec, Coefficient::one(), ExponentVector::unit(n, i)))
        .collect();
    let hs: Vec<Series> = fs.iter().zip(&xs).map(|(f, x)| f.sub(x)).collect::<Result<_>>()?;
    let mut gs: Vec<Series> = xs.iter().map(|x| x.truncated(&budget)).collect::<Result<_>>()?;
    for _ in 0..degree.max(1) {
        gs = hs
            .iter()
            .zip(&xs)
            .map(|(h, x)| x.sub(&compose(h, &gs, &budget)?))
            .collect::<Result<_>>()?;
    }
    Ok(gs)
}

/// Field for Lagrange residues: the order of `x_i` is that of `x_i t` for an
/// auxiliary most significant coordinate `t`, so total degree decides first.
pub fn homogenizing_spec(vars: &[String]) -> Result<FieldSpec> {
    let n = vars.len();
    let rows = (0..n)
        .map(|i| {
            let mut r = vec![0i64; n + 1];
            r[i] = 1;
            r[n] = 1;
            r
        })
        .collect();
    FieldSpec::with_twist(vars, rows)
}

fn is_diagonal(fs: &[Series]) -> bool {
    fs.iter().enumerate().all(|(i, f)| f.terms().all(|t| t.exponent.0[i] >= 1))
}

/// `[y^k] phi(G(y)) = Res_x F^(-1-k) phi(x) J(F)`, where the free variables
/// of `phi` are the variables of the field of `fs`.
pub fn lagrange_coefficient(phi: &Expr, fs: &[Series], k: &[i64], driver: &Driver) -> Result<Coefficient> {
    check_normalized(fs)?;
    let base = fs[0].spec();
    let n = base.nvars();
    if k.len() != n {
        return Err(MnError::Usage(format!("multi-index has {} entries for {n} variables", k.len())));
    }
    let spec = if is_diagonal(fs) {
        base.clone()
    } else {
        Arc::new(homogenizing_spec(base.vars())?)
    };
    let fs: Vec<Series> = fs.iter().map(|f| f.reinterpret(&spec)).collect::<Result<_>>()?;
    let xvars: Vec<usize> = (0..n).collect();
    let target = Embedded {
        region: PrecisionBox::symmetric(0, 0),
        cols: Vec::new(),
        shift: spec.phi(&ExponentVector(vec![-1; n])),
    };
    let jac = jacobian(&fs, &xvars)?;
    let s = driver.run(spec.width(), &target, |b| {
        let mut acc = expand(phi, &spec, b, &Scope::default())?;
        for (f, &ki) in fs.iter().zip(k) {
            let p = f.powi(-1 - ki, b)?;
            acc = acc.mul_capped(&p, Some(b.bound))?;
        }
        acc.mul_capped(&jac, Some(b.bound))
    })?;
    s.coefficient_at(&xvars, &vec![-1; n]).scalar_value()
}

/// Name of the `i`-th auxiliary variable in [`lagrange_generating_residue`].
pub fn aux_name(i: usize) -> String {
    format!("__y{i}")
}

/// `Res_x prod_i (F_i - y_i)^-1 J(F) phi(x)` as a series in fresh variables
/// `y`, which are more significant than every `x`; its coefficients are
/// those of `phi(G(y))`. Returns the series over the `y` variables, exact for
/// all exponents in `[0, degree]^n`.
pub fn lagrange_generating_residue(phi: &Expr, fs: &[Series], degree: i64, driver: &Driver) -> Result<Series> {
    check_normalized(fs)?;
    let base = fs[0].spec();
    let n = base.nvars();
    let mut vars: Vec<String> = base.vars().to_vec();
    vars.extend((0..n).map(aux_name));
    let width = 2 * n + 1;
    let mut rows = Vec::new();
    for i in 0..n {
        let mut r = vec![0i64; width];
        r[i] = 1;
        r[n] = 1;
        rows.push(r);
    }
    for i in 0..n {
        let mut r = vec![0i64; width];
        r[n + 1 + i] = 1;
        rows.push(r);
    }
    let spec = Arc::new(FieldSpec::with_twist(&vars, rows)?);
    let widen = |f: &Series| {
        Series::from_terms(
            &spec,
            f.terms().map(|t| {
                let mut e = t.exponent.0.clone();
                e.resize(2 * n, 0);
                (ExponentVector(e), t.coeff)
            }),
        )
    };
    let fs: Vec<Series> = fs.iter().map(widen).collect();
    let xvars: Vec<usize> = (0..n).collect();
    let jac = jacobian(&fs, &xvars)?;
    let ycols: Vec<usize> = (n + 1..width).collect();
    let mut shift = vec![0i64; 2 * n];
    shift[..n].iter_mut().for_each(|e| *e = -1);
    let target = Embedded {
        region: PrecisionBox::new(vec![(0, degree); n])?,
        cols: ycols,
        shift: spec.phi(&ExponentVector(shift)),
    };
    let s = driver.run(width, &target, |b| {
        let mut acc = expand(phi, &spec, b, &Scope::default())?;
        acc = acc.mul_capped(&jac, Some(b.bound))?;
        for (i, f) in fs.iter().enumerate() {
            let y = Series::monomial(&spec, Coefficient::one(), ExponentVector::unit(2 * n, n + i));
            let inv = f.sub(&y)?.invert(b)?;
            acc = acc.mul_capped(&inv, Some(b.bound))?;
        }
        Ok(acc)
    })?;
    Ok(s.coefficient_at(&xvars, &vec![-1; n]))
}

/// Coefficients of `s` (over `n` variables) with every exponent in
/// `[0, degree]`, keyed by exponent.
pub fn coefficients_up_to(s: &Series, degree: i64) -> Result<Vec<(Vec<i64>, Coefficient)>> {
    let n = s.spec().nvars();
    let mut out = Vec::new();
    let mut idx = vec![0i64; n];
    loop {
        if idx.iter().sum::<i64>() <= degree {
            let c = s.coefficient(&ExponentVector(idx.clone()))?;
            if !c.is_zero() {
                out.push((idx.clone(), c));
            }
        }
        let mut j = 0;
        loop {
            if j == n {
                return Ok(out);
            }
            idx[j] += 1;
            if idx[j] <= degree {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;
    use crate::expr::parse;
    use crate::order::OrderKey;

    fn spec(vars: &[&str]) -> Arc<FieldSpec> {
        Arc::new(FieldSpec::identity(vars).unwrap())
    }

    fn series(text: &str, spec: &Arc<FieldSpec>, b: &Budget) -> Series {
        expand(&parse(text).unwrap(), spec, b, &Scope::default()).unwrap()
    }

    #[test]
    fn jacobian_of_monomials() {
        let s = spec(&["x", "y"]);
        let b = Budget::new(Grading::geometric(2, 2), 10);
        let f = [series("x^2*y", &s, &b), series("x*y^3", &s, &b)];
        let j = jacobian(&f, &[0, 1]).unwrap();
        // j(f) f1 f2 / (x y) = 5 x^2 y^3
        assert_eq!(j, series("5*x^2*y^3", &s, &b));
        assert_eq!(jacobian_number(&f, &[0, 1]).unwrap(), 5);
    }

    #[test]
    fn worked_example_one() {
        let s = spec(&["x", "t"]);
        let f = [series("x^2 + x*t + x^3*t", &s, &Budget::new(Grading::geometric(2, 2), 0))];
        assert_eq!(jacobian_number(&f, &[0]).unwrap(), 2);
        let region = PrecisionBox::symmetric(16, 2);
        let lj = Driver::default()
            .run(2, &Embedded { region: region.project(&[1]), cols: vec![1], shift: OrderKey::zero(2) }, |b| {
                log_jacobian(&f, &[0], b)
            })
            .unwrap();
        let ct = lj.ct(&["x"]).unwrap();
        let terms = ct.terms_in(&PrecisionBox::symmetric(16, 1)).unwrap();
        assert_eq!(terms, vec![Term { coeff: int(2), exponent: ExponentVector(vec![0]) }]);
    }

    #[test]
    fn log_jacobian_of_big_example() {
        let s = spec(&["x", "y", "t"]);
        let region = PrecisionBox::symmetric(6, 3);
        let lj = Driver::default()
            .run(3, &region, |b| {
                let f = [series("x^2*y*exp(t/(x*y))", &s, b), series("x*y^2*exp(t/(x*y))", &s, b)];
                log_jacobian(&f, &[0, 1], b)
            })
            .unwrap();
        let expected = series("3 - 2*t/(x*y)", &s, &Budget::new(Grading::geometric(2, 3), 0));
        assert!(lj.agrees_on(&expected.truncated(&Budget::new(lj.grading().unwrap().clone(), i64::MAX)).unwrap(), &region).unwrap());
    }

    #[test]
    fn worked_example_two() {
        let s = spec(&["x"]);
        let scope = Scope::with_constants(HashMap::from([("p".to_string(), int(2))]));
        let cov = ChangeOfVariables::new(&s, &["x"], vec![parse("1-x^-1").unwrap()], scope, &Driver::default()).unwrap();
        assert_eq!(cov.jnum, -1);
        let phi = parse("x^4/(p*x+x^2)").unwrap();
        let region = PrecisionBox::symmetric(16, 1);
        for form in [Form::Residue, Form::ConstantTerm] {
            let v = cov.verify(&phi, form, &region, &Driver::default()).unwrap();
            assert!(v.equal, "{form:?}: {} vs {}", v.lhs, v.rhs);
            if form == Form::ConstantTerm {
                assert_eq!(v.lhs.scalar_value().unwrap(), int(-4));
            }
        }
    }

    #[test]
    fn singular_change_is_refused_unless_polynomial() {
        let s = spec(&["x1", "x2"]);
        let fs = vec![parse("x1^2").unwrap(), parse("x1*(1+x1)").unwrap()];
        let cov = ChangeOfVariables::new(&s, &["x1", "x2"], fs, Scope::default(), &Driver::default()).unwrap();
        assert_eq!(cov.jnum, 0);
        let region = PrecisionBox::symmetric(8, 2);
        let phi = parse("1/(x1-x2)").unwrap();
        assert_eq!(cov.verify(&phi, Form::Residue, &region, &Driver::default()).unwrap_err(), MnError::RefusedSingular);
        let poly = parse("x1^2*x2^-3 + x2").unwrap();
        let v = cov.verify(&poly, Form::Residue, &region, &Driver::default()).unwrap();
        assert!(v.equal);
    }

    #[test]
    fn catalan_inverse() {
        let s = spec(&["x"]);
        let f = [series("x - x^2", &s, &Budget::new(Grading::geometric(1, 1), 0))];
        let g = lagrange_inverse(&f, 10).unwrap();
        let catalan = [0, 1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862];
        for (k, c) in catalan.iter().enumerate() {
            assert_eq!(g[0].coefficient(&ExponentVector(vec![k as i64])).unwrap(), int(*c));
        }
        let x = parse("x").unwrap();
        assert_eq!(lagrange_coefficient(&x, &f, &[4], &Driver::default()).unwrap(), int(5));
        assert_eq!(lagrange_coefficient(&x, &f, &[3], &Driver::default()).unwrap(), int(2));
        assert_eq!(lagrange_coefficient(&x, &f, &[1], &Driver::default()).unwrap(), int(1));
    }

    #[test]
    fn bad_normalization() {
        let s = spec(&["x"]);
        let f = [series("2*x - x^2", &s, &Budget::new(Grading::geometric(1, 1), 0))];
        assert_eq!(lagrange_inverse(&f, 4).unwrap_err(), MnError::BadNormalization);
    }
}
