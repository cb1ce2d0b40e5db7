//! Logarithms of knot polynomials, the product-group derivation of the
//! composite coefficients, family resummation, extraction of the
//! coefficients `alpha` from su(N) slices, and the factorization checks.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::basis::{BasisError, CanonicalBasis, ElementKind, ElementRef};
use crate::changes::{validate_basis_change, BasisChangeError, BasisChangeReport};
use crate::knots::{homfly, jones, sun_slice, HomflyBudget, KnotError, PlanarDiagram};
use crate::linalg::{Matrix, SolutionSet};
use crate::poly::{LaurentPoly, LaurentPoly2, MPoly};
use crate::rational::{factorial, fmt_q, q, Q};
use crate::series::{substitute_exponential, BivariateSeries, RationalSeries, Series, SeriesError};
use crate::weights::{weight_product_group, weight_sun, FormalGroups, WeightConfig, WeightError};

#[derive(Debug, Error)]
pub enum FactorizationError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Knot(#[from] KnotError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    BasisChange(#[from] BasisChangeError),
    #[error("degree {degree} exceeds the basis degree {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("probe N = {0} outside 2..=9")]
    BadProbe(i64),
    #[error("no probes given")]
    NoProbes,
    #[error("monomial {monomial}: {detail}")]
    Unmatched { monomial: String, detail: String },
    #[error("monomial {monomial}: several undetermined composites")]
    NonTriangular { monomial: String },
    #[error("composite {0} received no equation")]
    Underdetermined(String),
    #[error("family member with factors {0} is not a basis element")]
    MissingFamilyMember(String),
    #[error("{0} is not a connected basis element")]
    NotConnected(String),
    #[error("base {base} already contains the generator {gen}")]
    BaseContainsGenerator { base: String, gen: String },
    #[error("degree {degree}: linear system is inconsistent over the probes {probes:?}")]
    Inconsistent { degree: usize, probes: Vec<i64> },
}

type Result<T> = std::result::Result<T, FactorizationError>;

/// Skein conventions used for every reported polynomial.
pub const SKEIN_CONVENTION: &str = "a P(+) - a^-1 P(-) = z P(0); su(N) slice a = q^N, z = q - q^-1, t = q^2 = e^x";

/// Coefficients `w_0..w_K` of the logarithm of a knot series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogExpansion {
    pub knot: String,
    pub slice: String,
    pub basis_version: Option<String>,
    #[serde(serialize_with = "crate::rational::serde_q::vec")]
    pub coeffs: Vec<Q>,
}

impl LogExpansion {
    pub fn labeled(mut self, knot: &str, slice: &str) -> Self {
        self.knot = knot.to_string();
        self.slice = slice.to_string();
        self
    }

    pub fn coeff(&self, i: usize) -> &Q {
        &self.coeffs[i]
    }
}

pub fn log_invariant(s: &RationalSeries) -> Result<LogExpansion> {
    let l = s.log()?;
    debug_assert!(l.coeff(0).is_zero());
    Ok(LogExpansion { knot: String::new(), slice: String::new(), basis_version: None, coeffs: l.coeffs().to_vec() })
}

/// Jones polynomial at `t = e^x`.
pub fn jones_series(pd: &PlanarDiagram, order: usize) -> Result<RationalSeries> {
    Ok(substitute_exponential(&jones(pd)?, order))
}

/// su(N) slice of a HOMFLY polynomial at `q = e^(x/2)`.
pub fn slice_series(h: &LaurentPoly2, n: i64, order: usize) -> Result<RationalSeries> {
    let p = sun_slice(h, n)?;
    let t = p.exponent_div(2).expect("knot slices are even in q").with_var('t');
    Ok(substitute_exponential(&t, order))
}

/// A knot with a display label.
#[derive(Clone, Debug)]
pub struct KnotInput {
    pub label: String,
    pub pd: PlanarDiagram,
}

impl KnotInput {
    pub fn new(label: &str, pd: PlanarDiagram) -> Self {
        KnotInput { label: label.to_string(), pd }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(KnotInput { label: name.to_string(), pd: crate::knots::knot_by_name(name)?.pd })
    }
}

const ALPHA_BASE: usize = 1 << 24;

/// Formal symbol `alpha` attached to a basis element.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub struct FormalAlpha(pub ElementRef);

impl FormalAlpha {
    pub fn symbol(self) -> usize {
        ALPHA_BASE + self.0.degree * 4096 + self.0.index
    }

    pub fn from_symbol(s: usize) -> Option<FormalAlpha> {
        let k = s.checked_sub(ALPHA_BASE)?;
        Some(FormalAlpha(ElementRef { degree: k / 4096, index: k % 4096 }))
    }
}

pub fn element_label(basis: &CanonicalBasis, r: ElementRef) -> String {
    match &basis.element(r).kind {
        ElementKind::Connected => format!("r{}_{}", r.degree, r.index + 1),
        ElementKind::Composite(f) if f.is_empty() => "1".into(),
        ElementKind::Composite(f) => {
            let mut parts: Vec<String> = Vec::new();
            let mut i = 0;
            while i < f.len() {
                let j = (i..f.len()).find(|&j| f[j] != f[i]).unwrap_or(f.len());
                let base = format!("r{}_{}", f[i].degree, f[i].index + 1);
                parts.push(if j - i > 1 { format!("{base}^{}", j - i) } else { base });
                i = j;
            }
            parts.join("*")
        }
    }
}

/// Symbol names: `a{i}_{j}` for alphas (`n` for the framing chord), and
/// `r{i}_{j}(G)`, `r{i}_{j}(G')` for group factors (`C2` for the chord).
pub struct SymbolNames {
    groups: BTreeMap<usize, (ElementRef, bool)>,
    framing: bool,
}

impl SymbolNames {
    pub fn name(&self, s: usize) -> String {
        if let Some(FormalAlpha(r)) = FormalAlpha::from_symbol(s) {
            if self.framing && r.degree == 1 {
                return "n".into();
            }
            return format!("a{}_{}", r.degree, r.index + 1);
        }
        match self.groups.get(&s) {
            Some((r, prime)) => {
                let base = if self.framing && r.degree == 1 { "C2".to_string() } else { format!("r{}_{}", r.degree, r.index + 1) };
                format!("{base}({})", if *prime { "G'" } else { "G" })
            }
            None => format!("s{s}"),
        }
    }

    pub fn render(&self, p: &MPoly) -> String {
        p.render(&|s| self.name(s))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Identity {
    pub element: ElementRef,
    pub label: String,
    pub factors: Vec<ElementRef>,
    /// Number of monomial equations that determine or re-check this coefficient.
    pub equations: usize,
    pub derived: String,
    pub expected: String,
    pub holds: bool,
}

/// Everything produced by matching both sides of the product-group identity.
pub struct Theorem1Derivation {
    pub max_degree: usize,
    pub identities: Vec<Theorem1Identity>,
    /// Solved composite coefficients in terms of connected ones.
    pub solved: BTreeMap<ElementRef, MPoly>,
    pub names: SymbolNames,
    group_symbols: BTreeMap<ElementRef, (usize, usize)>,
}

impl Theorem1Derivation {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|i| i.holds)
    }

    /// Coefficient of an element: its own symbol if connected, the derived
    /// expression if composite, 1 for the empty diagram.
    pub fn alpha(&self, basis: &CanonicalBasis, r: ElementRef) -> MPoly {
        match &basis.element(r).kind {
            ElementKind::Connected => MPoly::var(FormalAlpha(r).symbol()),
            ElementKind::Composite(f) if f.is_empty() => MPoly::one(),
            ElementKind::Composite(_) => self.solved[&r].clone(),
        }
    }

    /// Product of the `G` group symbols of an element's connected factors.
    pub fn group_weight(&self, basis: &CanonicalBasis, r: ElementRef) -> MPoly {
        factors_of(basis, r).iter().fold(MPoly::one(), |acc, c| &acc * &MPoly::var(self.group_symbols[c].0))
    }
}

fn factors_of(basis: &CanonicalBasis, r: ElementRef) -> Vec<ElementRef> {
    match &basis.element(r).kind {
        ElementKind::Connected => vec![r],
        ElementKind::Composite(f) => f.clone(),
    }
}

fn elements_through(basis: &CanonicalBasis, k: usize) -> Vec<ElementRef> {
    (0..=k).flat_map(|d| (0..basis.degree(d).dim()).map(move |index| ElementRef { degree: d, index })).collect()
}

/// The multinomial prediction: `prod_k alpha_k^p_k / p_k!`.
fn multinomial(factors: &[ElementRef], alpha: &dyn Fn(ElementRef) -> MPoly) -> MPoly {
    let mut counts: BTreeMap<ElementRef, u32> = BTreeMap::new();
    for f in factors {
        *counts.entry(*f).or_default() += 1;
    }
    counts.into_iter().fold(MPoly::one(), |acc, (r, p)| (&acc * &alpha(r).pow(p)).scale(&factorial(p as u64).recip()))
}

fn is_group_symbol(s: usize) -> bool {
    s < ALPHA_BASE
}

/// Expands both sides of `W(G x G') = W(G) W(G')` with formal coefficients
/// and formal group factors, matches every monomial, and solves for the
/// composite coefficients degree by degree.
pub fn derive_theorem1(basis: &CanonicalBasis, max_degree: usize) -> Result<Theorem1Derivation> {
    if max_degree > basis.max_degree {
        return Err(FactorizationError::DegreeTooHigh { degree: max_degree, max: basis.max_degree });
    }
    let k = max_degree;
    let elements = elements_through(basis, k);
    let mut groups = FormalGroups::new();
    let mut group_symbols = BTreeMap::new();
    let mut names = BTreeMap::new();
    for &r in &elements {
        if basis.element(r).is_connected() {
            let (g, h) = groups.symbols(&basis.element(r).diagram);
            group_symbols.insert(r, (g, h));
            names.insert(g, (r, false));
            names.insert(h, (r, true));
        }
    }
    let names = SymbolNames { groups: names, framing: !basis.reduced };
    let alpha_sym = |r: ElementRef| -> MPoly {
        if r.degree == 0 {
            MPoly::one()
        } else {
            MPoly::var(FormalAlpha(r).symbol())
        }
    };

    let mut lhs = BivariateSeries::<MPoly>::zero(k);
    for &r in &elements {
        let w = weight_product_group(&basis.element(r).diagram, &mut groups, k)?;
        let a = alpha_sym(r);
        for (e, c) in w.terms() {
            lhs.add_term(*e, &a * c);
        }
    }
    let side = |prime: bool| {
        let mut s = BivariateSeries::<MPoly>::zero(k);
        for &r in &elements {
            let w = factors_of(basis, r).iter().fold(MPoly::one(), |acc, c| {
                let (g, h) = group_symbols[c];
                &acc * &MPoly::var(if prime { h } else { g })
            });
            let a = &w * &alpha_sym(r);
            s.add_term(if prime { (0, r.degree) } else { (r.degree, 0) }, a);
        }
        s
    };
    let rhs = side(false).mul(&side(true));
    let diff = lhs.sub(&rhs);

    // equations grouped by (x-bidegree, group monomial), in increasing total degree
    let mut equations: BTreeMap<(usize, (usize, usize), Vec<(usize, u32)>), MPoly> = BTreeMap::new();
    for (e, c) in diff.terms() {
        for (m, x) in c.terms() {
            let (gm, am): (Vec<(usize, u32)>, Vec<(usize, u32)>) = m.iter().partition(|(s, _)| is_group_symbol(*s));
            let eq = equations.entry((e.0 + e.1, *e, gm)).or_default();
            eq.add_term(am, x.clone());
        }
    }
    let composite_syms: BTreeMap<usize, ElementRef> = elements
        .iter()
        .filter(|r| r.degree > 0 && !basis.element(**r).is_connected())
        .map(|r| (FormalAlpha(*r).symbol(), *r))
        .collect();
    let mut solved: BTreeMap<ElementRef, MPoly> = BTreeMap::new();
    let mut subst: BTreeMap<usize, MPoly> = BTreeMap::new();
    for ((_, e, gm), eq) in &equations {
        let label = || {
            let g: MPoly = {
                let mut p = MPoly::zero();
                p.add_term(gm.clone(), crate::rational::one());
                p
            };
            format!("x^{} x'^{} {}", e.0, e.1, names.render(&g))
        };
        let eq = eq.substitute(&subst);
        let unknown: Vec<usize> = eq.variables().into_iter().filter(|s| composite_syms.contains_key(s)).collect();
        match unknown.len() {
            0 => {
                if !eq.is_zero() {
                    return Err(FactorizationError::Unmatched { monomial: label(), detail: format!("residual {} is not an identity", names.render(&eq)) });
                }
            }
            1 => {
                let s = unknown[0];
                let r = composite_syms[&s];
                if eq.degree_in(&[s]) != Some(1) {
                    return Err(FactorizationError::NonTriangular { monomial: label() });
                }
                let mut coef = Q::zero();
                let mut rest = MPoly::zero();
                for (m, x) in eq.terms() {
                    if m.iter().any(|(v, _)| *v == s) {
                        if m.len() != 1 {
                            return Err(FactorizationError::NonTriangular { monomial: label() });
                        }
                        coef += x;
                    } else {
                        rest.add_term(m.clone(), x.clone());
                    }
                }
                let value = rest.scale(&(-coef.recip()));
                subst.insert(s, value.clone());
                solved.insert(r, value);
            }
            _ => return Err(FactorizationError::NonTriangular { monomial: label() }),
        }
    }
    let mut identities = Vec::new();
    for &r in composite_syms.values() {
        let derived = solved.get(&r).ok_or_else(|| FactorizationError::Underdetermined(element_label(basis, r)))?;
        let f = factors_of(basis, r);
        let expected = multinomial(&f, &|c| MPoly::var(FormalAlpha(c).symbol()));
        let count = equations
            .iter()
            .filter(|(_, eq)| eq.variables().contains(&FormalAlpha(r).symbol()) && eq.terms().any(|(m, _)| m.len() == 1 && m[0] == (FormalAlpha(r).symbol(), 1)))
            .count();
        identities.push(Theorem1Identity {
            element: r,
            label: element_label(basis, r),
            factors: f,
            equations: count,
            derived: names.render(derived),
            expected: names.render(&expected),
            holds: *derived == expected,
        });
    }
    identities.sort_by_key(|i| i.element);
    Ok(Theorem1Derivation { max_degree: k, identities, solved, names, group_symbols })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResummationCheck {
    pub base: String,
    pub generator: String,
    pub order: usize,
    pub members: Vec<String>,
    pub family: Vec<String>,
    pub closed_form: Vec<String>,
    pub holds: bool,
}

fn render_series(s: &Series<MPoly>, names: &SymbolNames) -> Vec<String> {
    s.coeffs().iter().map(|c| names.render(c)).collect()
}

fn find_by_factors(basis: &CanonicalBasis, factors: &[ElementRef]) -> Option<ElementRef> {
    let d: usize = factors.iter().map(|f| f.degree).sum();
    if d > basis.max_degree {
        return None;
    }
    let db = basis.degree(d);
    (0..db.dim()).map(|index| ElementRef { degree: d, index }).find(|r| {
        let mut f = factors.to_vec();
        f.sort();
        factors_of(basis, *r) == f || (f.is_empty() && d == 0)
    })
}

/// Sums the family `base * gen^q` with the derived coefficients and compares
/// it with `alpha_base r_base x^deg * exp(alpha_gen r_gen x^deg_gen)` to order `k`.
pub fn resum_family(basis: &CanonicalBasis, derivation: &Theorem1Derivation, base: ElementRef, gen: ElementRef, k: usize) -> Result<ResummationCheck> {
    if !basis.element(gen).is_connected() {
        return Err(FactorizationError::NotConnected(element_label(basis, gen)));
    }
    if k > derivation.max_degree {
        return Err(FactorizationError::DegreeTooHigh { degree: k, max: derivation.max_degree });
    }
    let base_factors = if base.degree == 0 { Vec::new() } else { factors_of(basis, base) };
    if base_factors.contains(&gen) {
        return Err(FactorizationError::BaseContainsGenerator { base: element_label(basis, base), gen: element_label(basis, gen) });
    }
    let mut family = Series::<MPoly>::zero(k);
    let mut members = Vec::new();
    let mut qn = 0;
    loop {
        let deg = base.degree + qn * gen.degree;
        if deg > k {
            break;
        }
        let mut f = base_factors.clone();
        f.extend(std::iter::repeat(gen).take(qn));
        let r = find_by_factors(basis, &f).ok_or_else(|| FactorizationError::MissingFamilyMember(format!("{f:?}")))?;
        let term = &derivation.alpha(basis, r) * &derivation.group_weight(basis, r);
        family = family.add(&Series::monomial(k, deg, term));
        members.push(element_label(basis, r));
        qn += 1;
    }
    let head = &derivation.alpha(basis, base) * &derivation.group_weight(basis, base);
    let exponent = Series::monomial(k, gen.degree, &derivation.alpha(basis, gen) * &derivation.group_weight(basis, gen));
    let closed = Series::monomial(k, base.degree, head).mul(&exponent.exp()?);
    Ok(ResummationCheck {
        base: element_label(basis, base),
        generator: element_label(basis, gen),
        order: k,
        members,
        family: render_series(&family, &derivation.names),
        closed_form: render_series(&closed, &derivation.names),
        holds: family == closed,
    })
}

/// The whole expansion `sum_j alpha_j r_j x^deg` equals
/// `exp(alpha_gen r_gen x^deg_gen)` times its generator-free part.
pub fn resum_all(basis: &CanonicalBasis, derivation: &Theorem1Derivation, gen: ElementRef, k: usize) -> Result<ResummationCheck> {
    if !basis.element(gen).is_connected() {
        return Err(FactorizationError::NotConnected(element_label(basis, gen)));
    }
    let mut full = Series::<MPoly>::zero(k);
    let mut free = Series::<MPoly>::zero(k);
    let mut members = Vec::new();
    for r in elements_through(basis, k) {
        let term = Series::monomial(k, r.degree, &derivation.alpha(basis, r) * &derivation.group_weight(basis, r));
        full = full.add(&term);
        if !factors_of(basis, r).contains(&gen) {
            free = free.add(&term);
        }
        members.push(element_label(basis, r));
    }
    let exponent = Series::monomial(k, gen.degree, &derivation.alpha(basis, gen) * &derivation.group_weight(basis, gen));
    let closed = free.mul(&exponent.exp()?);
    Ok(ResummationCheck {
        base: "all generator-free elements".into(),
        generator: element_label(basis, gen),
        order: k,
        members,
        family: render_series(&full, &derivation.names),
        closed_form: render_series(&closed, &derivation.names),
        holds: full == closed,
    })
}

/// Exact solution set rendered for reports.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceReport {
    #[serde(serialize_with = "crate::rational::serde_q::vec")]
    pub particular: Vec<Q>,
    #[serde(serialize_with = "crate::rational::serde_q::mat")]
    pub nullspace: Vec<Vec<Q>>,
}

impl From<&SolutionSet> for SubspaceReport {
    fn from(s: &SolutionSet) -> Self {
        SubspaceReport { particular: s.particular.clone(), nullspace: s.nullspace.clone() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeExtraction {
    pub degree: usize,
    pub elements: Vec<String>,
    /// Row per probe: weights of the elements at that N.
    #[serde(serialize_with = "crate::rational::serde_q::mat")]
    pub design: Vec<Vec<Q>>,
    #[serde(serialize_with = "crate::rational::serde_q::vec")]
    pub rhs: Vec<Q>,
    pub rank: usize,
    pub training_rank: usize,
    pub full_rank: bool,
    /// Unique solution of the training probes, when it exists.
    #[serde(serialize_with = "crate::rational::serde_q::opt_vec")]
    pub alpha: Option<Vec<Q>>,
    /// Solution set over all probes.
    pub solvable: SubspaceReport,
    /// Whether the held-out probe agrees with the training solution (full rank only).
    pub held_out_consistent: Option<bool>,
    #[serde(skip)]
    pub solution: SolutionSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractionResult {
    pub knot: String,
    pub basis_version: String,
    pub reduced: bool,
    pub weight_normalization: String,
    pub skein_convention: String,
    pub probes: Vec<i64>,
    pub held_out: Option<i64>,
    pub degrees: Vec<DegreeExtraction>,
}

impl ExtractionResult {
    pub fn full_rank(&self) -> bool {
        self.degrees.iter().all(|d| d.full_rank)
    }

    pub fn alpha(&self, r: ElementRef) -> Option<&Q> {
        self.degrees.get(r.degree)?.alpha.as_ref()?.get(r.index)
    }
}

fn check_probes(probes: &[i64]) -> Result<()> {
    if probes.is_empty() {
        return Err(FactorizationError::NoProbes);
    }
    match probes.iter().find(|n| !(2..=9).contains(*n)) {
        Some(n) => Err(FactorizationError::BadProbe(*n)),
        None => Ok(()),
    }
}

/// Slice series of a knot at each probe.
pub fn probe_series(knot: &KnotInput, probes: &[i64], order: usize) -> Result<Vec<RationalSeries>> {
    check_probes(probes)?;
    let h = homfly(&knot.pd, HomflyBudget::default())?;
    probes.iter().map(|&n| slice_series(&h, n, order)).collect()
}

/// Element weights per degree, as polynomials in `N`.
pub fn basis_weights(basis: &CanonicalBasis, max_degree: usize, cfg: &WeightConfig) -> Vec<Vec<LaurentPoly>> {
    (0..=max_degree).map(|d| basis.degree(d).elements.iter().map(|e| weight_sun(&e.diagram, cfg)).collect()).collect()
}

/// Solves one degree: `coeff_i(N) = sum_j alpha_j w_j(N)` over the probes,
/// with the last probe held out when there are at least two.
pub fn extract_degree(degree: usize, labels: Vec<String>, weights: &[LaurentPoly], probes: &[i64], rhs: Vec<Q>) -> Result<DegreeExtraction> {
    let design: Vec<Vec<Q>> = probes.iter().map(|&n| weights.iter().map(|w| w.eval(&q(n))).collect()).collect();
    let dim = weights.len();
    let m = Matrix::from_rows(design.clone());
    let solution = m.solve(&rhs).ok_or_else(|| FactorizationError::Inconsistent { degree, probes: probes.to_vec() })?;
    let train = if probes.len() >= 2 { probes.len() - 1 } else { probes.len() };
    let tm = Matrix::from_rows(design[..train].to_vec());
    let training = tm.solve(&rhs[..train]).ok_or_else(|| FactorizationError::Inconsistent { degree, probes: probes[..train].to_vec() })?;
    let full_rank = training.rank == dim;
    let alpha = full_rank.then(|| training.particular.clone());
    let held_out_consistent = match (&alpha, probes.len() >= 2) {
        (Some(a), true) => {
            let row = &design[probes.len() - 1];
            let lhs: Q = row.iter().zip(a).map(|(w, x)| w * x).fold(Q::zero(), |s, t| s + t);
            Some(lhs == rhs[probes.len() - 1])
        }
        _ => None,
    };
    Ok(DegreeExtraction {
        degree,
        elements: labels,
        design,
        rhs,
        rank: solution.rank,
        training_rank: training.rank,
        full_rank,
        alpha,
        solvable: SubspaceReport::from(&solution),
        held_out_consistent,
        solution,
    })
}

pub fn extract_alphas(knot: &KnotInput, basis: &CanonicalBasis, max_degree: usize, probes: &[i64]) -> Result<ExtractionResult> {
    extract_alphas_with(knot, basis, max_degree, probes, &WeightConfig::default())
}

pub fn extract_alphas_with(knot: &KnotInput, basis: &CanonicalBasis, max_degree: usize, probes: &[i64], cfg: &WeightConfig) -> Result<ExtractionResult> {
    if max_degree > basis.max_degree {
        return Err(FactorizationError::DegreeTooHigh { degree: max_degree, max: basis.max_degree });
    }
    let series = probe_series(knot, probes, max_degree)?;
    let weights = basis_weights(basis, max_degree, cfg);
    let mut degrees = Vec::new();
    for d in 0..=max_degree {
        let labels = (0..basis.degree(d).dim()).map(|index| element_label(basis, ElementRef { degree: d, index })).collect();
        let rhs = series.iter().map(|s| s.coeff(d).clone()).collect();
        degrees.push(extract_degree(d, labels, &weights[d], probes, rhs)?);
    }
    Ok(ExtractionResult {
        knot: knot.label.clone(),
        basis_version: basis.version.clone(),
        reduced: basis.reduced,
        weight_normalization: cfg.describe(),
        skein_convention: SKEIN_CONVENTION.into(),
        probes: probes.to_vec(),
        held_out: (probes.len() >= 2).then(|| probes[probes.len() - 1]),
        degrees,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositeCheck {
    pub element: String,
    pub status: CheckStatus,
    #[serde(serialize_with = "ser_opt_q")]
    pub extracted: Option<Q>,
    #[serde(serialize_with = "ser_opt_q")]
    pub predicted: Option<Q>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionCheck {
    pub probe: i64,
    pub status: CheckStatus,
    /// First mismatching degree with the expected and reconstructed coefficients.
    pub mismatch: Option<(usize, String, String)>,
}

/// Extraction of connected coefficients from the logarithm, with composites
/// fixed by the multinomial rule. A diagnostic for rank-deficient degrees; it
/// assumes the composite rule instead of testing it.
#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveDiagnostic {
    pub degrees: Vec<PrimitiveDegree>,
    /// Highest degree through which every connected coefficient is determined.
    pub through_degree: usize,
    pub reconstruction: Vec<ReconstructionCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveDegree {
    pub degree: usize,
    pub connected_rank: usize,
    pub connected: usize,
    #[serde(serialize_with = "crate::rational::serde_q::opt_vec")]
    pub alpha: Option<Vec<Q>>,
    pub held_out_consistent: Option<bool>,
    /// Whether the implied full coefficient vector solves the direct system.
    pub in_direct_solution_set: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub knot: String,
    pub max_degree: usize,
    pub extraction: ExtractionResult,
    pub full_rank: bool,
    /// `(degree, rank, dimension)` for every rank-deficient degree.
    pub deficient_degrees: Vec<(usize, usize, usize)>,
    pub theorem1: Vec<CompositeCheck>,
    pub reconstruction: Vec<ReconstructionCheck>,
    pub primitive_diagnostic: PrimitiveDiagnostic,
    pub passed: bool,
}

fn ser_opt_q<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&fmt_q(v)),
        None => s.serialize_none(),
    }
}

fn reconstruct(probe: i64, alphas: &[(ElementRef, Q)], weights: &[Vec<LaurentPoly>], target: &RationalSeries) -> Result<ReconstructionCheck> {
    let k = target.order();
    let mut exponent = vec![Q::zero(); k + 1];
    for (r, a) in alphas {
        if r.degree <= k {
            exponent[r.degree] += a * weights[r.degree][r.index].eval(&q(probe));
        }
    }
    let got = RationalSeries::new(k, exponent).exp()?;
    let mismatch = (0..=k).find(|&i| got.coeff(i) != target.coeff(i)).map(|i| (i, fmt_q(target.coeff(i)), fmt_q(got.coeff(i))));
    Ok(ReconstructionCheck { probe, status: if mismatch.is_none() { CheckStatus::Pass } else { CheckStatus::Fail }, mismatch })
}

fn primitive_diagnostic(basis: &CanonicalBasis, extraction: &ExtractionResult, weights: &[Vec<LaurentPoly>], series: &[RationalSeries], max_degree: usize) -> Result<PrimitiveDiagnostic> {
    let probes = &extraction.probes;
    let logs: Vec<RationalSeries> = series.iter().map(|s| s.log()).collect::<std::result::Result<_, _>>()?;
    let mut connected_alpha: BTreeMap<ElementRef, Q> = BTreeMap::new();
    let mut all_known = true;
    let mut degrees: Vec<PrimitiveDegree> = Vec::new();
    for d in 1..=max_degree {
        let db = basis.degree(d);
        let labels = (0..db.connected).map(|index| element_label(basis, ElementRef { degree: d, index })).collect();
        let rhs = logs.iter().map(|l| l.coeff(d).clone()).collect();
        let ex = extract_degree(d, labels, &weights[d][..db.connected], probes, rhs)?;
        let mut in_set = None;
        match &ex.alpha {
            Some(a) => {
                for (index, x) in a.iter().enumerate() {
                    connected_alpha.insert(ElementRef { degree: d, index }, x.clone());
                }
                if all_known {
                    let mut full = a.clone();
                    for index in db.connected..db.dim() {
                        let r = ElementRef { degree: d, index };
                        let value = multinomial(&factors_of(basis, r), &|c| MPoly::constant(connected_alpha[&c].clone()));
                        full.push(value.eval(&BTreeMap::new()).expect("constant"));
                    }
                    in_set = Some(extraction.degrees[d].solution.contains(&full));
                }
            }
            None => all_known = false,
        }
        degrees.push(PrimitiveDegree {
            degree: d,
            connected_rank: ex.training_rank,
            connected: db.connected,
            alpha: ex.alpha.clone(),
            held_out_consistent: ex.held_out_consistent,
            in_direct_solution_set: in_set,
        });
    }
    let through = degrees.iter().take_while(|d| d.alpha.is_some()).last().map_or(0, |d| d.degree);
    let alphas: Vec<(ElementRef, Q)> = connected_alpha.into_iter().filter(|(r, _)| r.degree <= through).collect();
    let reconstruction =
        probes.iter().zip(series).map(|(&n, s)| reconstruct(n, &alphas, weights, &s.truncate(through))).collect::<Result<_>>()?;
    Ok(PrimitiveDiagnostic { degrees, through_degree: through, reconstruction })
}

/// Runs the extraction, then (a) compares every composite coefficient with
/// the product of its factors' coefficients and (b) rebuilds each probe's
/// series as the exponential of the connected terms.
pub fn verify_factorization(knot: &KnotInput, basis: &CanonicalBasis, max_degree: usize, probes: &[i64]) -> Result<FactorizationReport> {
    let cfg = WeightConfig::default();
    let extraction = extract_alphas_with(knot, basis, max_degree, probes, &cfg)?;
    let series = probe_series(knot, probes, max_degree)?;
    let weights = basis_weights(basis, max_degree, &cfg);
    let deficient_degrees: Vec<(usize, usize, usize)> =
        extraction.degrees.iter().filter(|d| !d.full_rank).map(|d| (d.degree, d.training_rank, d.elements.len())).collect();

    let mut theorem1 = Vec::new();
    for d in 1..=max_degree {
        let db = basis.degree(d);
        for index in db.connected..db.dim() {
            let r = ElementRef { degree: d, index };
            let f = factors_of(basis, r);
            let extracted = extraction.alpha(r).cloned();
            let predicted = if f.iter().all(|c| extraction.alpha(*c).is_some()) {
                let p = multinomial(&f, &|c| MPoly::constant(extraction.alpha(c).unwrap().clone()));
                Some(p.eval(&BTreeMap::new()).expect("constant"))
            } else {
                None
            };
            let status = match (&extracted, &predicted) {
                (Some(a), Some(b)) if a == b => CheckStatus::Pass,
                (Some(_), Some(_)) => CheckStatus::Fail,
                _ => CheckStatus::Undetermined,
            };
            theorem1.push(CompositeCheck { element: element_label(basis, r), status, extracted, predicted });
        }
    }

    let connected: Vec<(ElementRef, Option<Q>)> = (1..=max_degree)
        .flat_map(|d| (0..basis.degree(d).connected).map(move |index| ElementRef { degree: d, index }))
        .map(|r| (r, extraction.alpha(r).cloned()))
        .collect();
    let reconstruction: Vec<ReconstructionCheck> = if connected.iter().all(|(_, a)| a.is_some()) {
        let alphas: Vec<(ElementRef, Q)> = connected.into_iter().map(|(r, a)| (r, a.unwrap())).collect();
        probes.iter().zip(&series).map(|(&n, s)| reconstruct(n, &alphas, &weights, s)).collect::<Result<_>>()?
    } else {
        probes.iter().map(|&n| ReconstructionCheck { probe: n, status: CheckStatus::Undetermined, mismatch: None }).collect()
    };
    let primitive_diagnostic = primitive_diagnostic(basis, &extraction, &weights, &series, max_degree)?;
    let full_rank = deficient_degrees.is_empty();
    let held_out_ok = extraction.degrees.iter().all(|d| d.held_out_consistent != Some(false));
    let passed = full_rank
        && held_out_ok
        && theorem1.iter().all(|c| c.status == CheckStatus::Pass)
        && reconstruction.iter().all(|c| c.status == CheckStatus::Pass);
    Ok(FactorizationReport {
        knot: knot.label.clone(),
        max_degree,
        extraction,
        full_rank,
        deficient_degrees,
        theorem1,
        reconstruction,
        primitive_diagnostic,
        passed,
    })
}

/// Result of re-extracting after `r'_j = sum_k N_jk r_k` at one degree.
#[derive(Clone, Debug, Serialize)]
pub struct CovarianceCheck {
    pub degree: usize,
    pub change: BasisChangeReport,
    pub original: SubspaceReport,
    pub transformed: SubspaceReport,
    pub re_extracted: SubspaceReport,
    pub holds: bool,
}

/// Checks `alpha' = alpha N^-1` by extracting in the new basis. Rank-deficient
/// degrees compare whole solution sets.
pub fn basis_change_covariance(knot: &KnotInput, basis: &CanonicalBasis, degree: usize, m: &Matrix, probes: &[i64]) -> Result<CovarianceCheck> {
    if degree > basis.max_degree {
        return Err(FactorizationError::DegreeTooHigh { degree, max: basis.max_degree });
    }
    let change = validate_basis_change(m, basis, degree)?;
    let cfg = WeightConfig::default();
    let series = probe_series(knot, probes, degree)?;
    let rhs: Vec<Q> = series.iter().map(|s| s.coeff(degree).clone()).collect();
    let weights = basis_weights(basis, degree, &cfg).swap_remove(degree);
    let dim = weights.len();
    let labels: Vec<String> = (0..dim).map(|j| format!("r{degree}_{}", j + 1)).collect();
    let original = extract_degree(degree, labels.clone(), &weights, probes, rhs.clone())?;
    let new_weights: Vec<LaurentPoly> = (0..dim)
        .map(|j| (0..dim).fold(LaurentPoly::zero('N'), |acc, k| &acc + &weights[k].scale(m.get(j, k))))
        .collect();
    let re = extract_degree(degree, labels, &new_weights, probes, rhs)?;
    let inv = &change.alpha_transform;
    let transformed = SolutionSet {
        particular: inv.left_mul_vec(&original.solution.particular),
        nullspace: original.solution.nullspace.iter().map(|v| inv.left_mul_vec(v)).collect(),
        rank: original.solution.rank,
    };
    Ok(CovarianceCheck {
        degree,
        holds: re.solution.same_set(&transformed),
        original: SubspaceReport::from(&original.solution),
        transformed: SubspaceReport::from(&transformed),
        re_extracted: SubspaceReport::from(&re.solution),
        change,
    })
}
