//! Combinators on differential graded structures: opposite, tensor product,
//! sub/ideal testing, quotients, cohomology, and homomorphism checking.
//!
//! A [`GradedPseudoStructure`] is a `PseudoStructure` whose grading and
//! differential are mandatory, with `d` homogeneous of degree 1 and `d∘d = 0`
//! established at construction time, before any graded law relies on them.
//! Every sign used here goes through [`crate::scalar::sign_pow`]; the three
//! composite conventions are `(−1)^{|a|}` (differential past a product
//! factor), `(−1)^{|a|+p}` (past a bracket argument), and
//! `(−1)^{(|a|+p)(|b|+p)}` (argument swaps).

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hopf::{Kernel, Mono};
use crate::linalg::{sparse_from_dense, sparse_to_dense, Mat, SparseRref};
use crate::module::{Grading, HMap, MElt, Module, Presentation};
use crate::polytensor::PolyTensor;
use crate::report::{LawRecord, LawRun, Report};
use crate::scalar::{rat, sign_pow, Rat};
use crate::structure::{
    record_conventions, run_suite, Bracket, Product, PseudoStructure, SuiteOptions,
};
use crate::upoly::{self, UPoly};

/// A structure with mandatory grading and differential. The constructor
/// checks that `d` is homogeneous of degree 1 (the zero map counts) and that
/// `d∘d` kills every generator, so downstream code may assume both.
#[derive(Debug, Clone)]
pub struct GradedPseudoStructure(PseudoStructure);

impl std::ops::Deref for GradedPseudoStructure {
    type Target = PseudoStructure;
    fn deref(&self) -> &PseudoStructure {
        &self.0
    }
}

impl GradedPseudoStructure {
    pub fn new(s: PseudoStructure) -> Result<Self> {
        s.validate()?;
        let g = s.grading.as_ref().ok_or_else(|| {
            Error::InvalidGrading(format!("{} has no grading; the graded combinators need one", s.name))
        })?;
        let d = s.differential.as_ref().ok_or_else(|| {
            Error::InvalidMap(format!("{} has no differential; the graded combinators need one", s.name))
        })?;
        match d.degree_shift(&s.module, &s.module, g, g)? {
            None | Some(1) => {}
            Some(k) => {
                return Err(Error::InvalidMap(format!(
                    "the differential of {} shifts degree by {}, not 1",
                    s.name, k
                )))
            }
        }
        for i in 0..s.module.gens() {
            let dd = s.apply_d(&s.apply_d(&s.module.gen_elt(i)));
            if !s.module.elt_is_zero(&dd) {
                return Err(Error::InvalidMap(format!(
                    "the differential of {} does not square to zero: d(d(e{})) = {}",
                    s.name,
                    i + 1,
                    s.module.fmt_elt(&dd)
                )));
            }
        }
        Ok(GradedPseudoStructure(s))
    }

    pub fn structure(&self) -> &PseudoStructure {
        &self.0
    }

    pub fn into_inner(self) -> PseudoStructure {
        self.0
    }
}

/// Law ids that fail for `s` under the full suite.
fn failing_laws(s: &PseudoStructure, opts: SuiteOptions) -> Result<Vec<String>> {
    Ok(run_suite(s, opts)?
        .into_iter()
        .filter(|r| !r.passed())
        .map(|r| r.law)
        .collect())
}

/// Refuses combinator input that does not satisfy the laws it relies on.
fn require_laws(op: &str, s: &PseudoStructure, opts: SuiteOptions) -> Result<()> {
    let failing = failing_laws(s, opts)?;
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidTable(format!(
            "{} needs a law-abiding input; {} fails: {}",
            op,
            s.name,
            failing.join(", ")
        )))
    }
}

/// Kernel generators followed by the unit, without duplicates. Checking a
/// multiplicative condition on this set determines it on all of the kernel.
fn gens_with_unit(kernel: &Kernel) -> Vec<Mono> {
    let mut out: Vec<Mono> = Vec::new();
    for i in 0..kernel.gen_count() {
        let m = kernel.gen_mono(i);
        if !out.contains(&m) {
            out.push(m);
        }
    }
    let unit = kernel.unit_mono();
    if !out.contains(&unit) {
        out.push(unit);
    }
    out
}

fn basis_vec(n: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[i] = rat(1);
    v
}

fn mat_from_cols(rows: usize, cols: &[Vec<Rat>]) -> Mat {
    let mut data = Vec::with_capacity(rows);
    for r in 0..rows {
        data.push(cols.iter().map(|c| c[r].clone()).collect());
    }
    if cols.is_empty() {
        return Mat::zero(rows, 0);
    }
    Mat::from_rows(data)
}

/// Free-module element as a vector of univariate polynomials; errors unless
/// the module is free over the one-variable polynomial kernel.
fn melt_to_upvec(x: &MElt) -> Result<Vec<UPoly>> {
    match x {
        MElt::Free(v) => v.iter().map(UPoly::from_hopf).collect(),
        MElt::Fin(_) => Err(Error::InvalidModule(
            "expected an element of a free module".into(),
        )),
    }
}

fn upvec_to_melt(kernel: &Kernel, v: &[UPoly]) -> MElt {
    MElt::Free(v.iter().map(|p| p.to_hopf(kernel)).collect())
}

/// Applies an H-linear map to the module parts of a tensor, landing in the
/// target module. Tuples are untouched, so normal form is preserved.
fn push_tensor(source: &Module, target: &Module, map: &HMap, t: &PolyTensor) -> PolyTensor {
    let mut out = PolyTensor::zero(t.slots);
    for (tuple, m) in t.terms() {
        out.add_term(target, tuple.clone(), map.apply(source, target, m));
    }
    out
}

/// The opposite structure: same module, product, differential, and grading,
/// negated bracket. Skew-symmetry, Jacobi, the Leibniz rules, and the
/// differential rules are each linear or quadratic in the bracket, so the
/// sign change preserves all of them.
pub fn build_opposite(s: &GradedPseudoStructure) -> Result<GradedPseudoStructure> {
    require_laws("the opposite construction", s, SuiteOptions::default())?;
    let mut out = s.structure().clone();
    out.name = format!("Op({})", s.name);
    let module = out.module.clone();
    if let Some(br) = &mut out.bracket {
        for t in br.entries.values_mut() {
            *t = t.scale(&module, &sign_pow(1));
        }
    }
    GradedPseudoStructure::new(out)
}

/// Shared state for the tensor-product condition checks and construction.
struct TensorCtx<'a> {
    sa: &'a PseudoStructure,
    sb: &'a PseudoStructure,
    tmod: Module,
    na: usize,
    nb: usize,
}

/// The diagonal action module A⊗B: basis pairs (i, j) flattened row-major as
/// i·dim(B)+j. Grouplike generators act on both legs at once, primitive ones
/// as a sum of one-leg actions, matching the coproduct.
fn tensor_module(a: &Module, b: &Module) -> Result<Module> {
    if a.kernel != b.kernel {
        return Err(Error::KernelMismatch(
            "tensor factors live over different kernels".into(),
        ));
    }
    let (Presentation::FiniteDim { dim: da, action: aa }, Presentation::FiniteDim { dim: db, action: ab }) =
        (&a.presentation, &b.presentation)
    else {
        return Err(Error::Unsupported(
            "the tensor product needs finite-dimensional factors".into(),
        ));
    };
    let mut action = Vec::new();
    for (ga, gb) in aa.iter().zip(ab) {
        let m = match &a.kernel {
            Kernel::Group { .. } => ga.kronecker(gb),
            Kernel::Polynomial { .. } => ga
                .kronecker(&Mat::identity(*db))
                .add(&Mat::identity(*da).kronecker(gb)),
        };
        action.push(m);
    }
    Module::finite(&a.kernel, action)
}

impl<'a> TensorCtx<'a> {
    fn new(sa: &'a PseudoStructure, sb: &'a PseudoStructure) -> Result<Self> {
        let tmod = tensor_module(&sa.module, &sb.module)?;
        let na = sa.module.gens();
        let nb = sb.module.gens();
        Ok(TensorCtx { sa, sb, tmod, na, nb })
    }

    /// Product of two generators of A, as coordinates.
    fn pa(&self, i: usize, j: usize) -> Result<Vec<Rat>> {
        let v = self
            .sa
            .product_eval(&self.sa.module.gen_elt(i), &self.sa.module.gen_elt(j))?;
        Ok(self.sa.module.fin_coords(&v).to_vec())
    }

    fn pb(&self, i: usize, j: usize) -> Result<Vec<Rat>> {
        let v = self
            .sb
            .product_eval(&self.sb.module.gen_elt(i), &self.sb.module.gen_elt(j))?;
        Ok(self.sb.module.fin_coords(&v).to_vec())
    }

    /// Pure tensor of coordinate vectors inside the flattened module.
    fn tens(&self, x: &[Rat], y: &[Rat]) -> MElt {
        let mut v = vec![Rat::zero(); self.na * self.nb];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    v[i * self.nb + j] = xi * yj;
                }
            }
        }
        MElt::Fin(v)
    }

    /// First compatibility condition between the action and the products:
    /// Σ (1 ⊗ h·g₍₁₎ ⊗ g₍₂₎) ⊗ (a·a')⊗(b·(S(g₍₃₎)b'))
    ///   = Σ (h₍₁₎ ⊗ g·h₍₂₎ ⊗ 1) ⊗ ((S(h₍₃₎)a)·a')⊗(b·b').
    fn com1(&self, g: &Mono, h: &Mono, q: [usize; 4]) -> Result<Option<String>> {
        let [a0, a1, b0, b1] = q;
        let kernel = &self.tmod.kernel;
        let unit = kernel.unit_mono();
        let aa = self.pa(a0, a1)?;
        let bb = self.pb(b0, b1)?;
        let mut lhs = PolyTensor::zero(3);
        for (legs, c) in kernel.mono_coproduct_legs(g, 3) {
            let (sm, sc) = kernel.mono_antipode(&legs[2]);
            let bp = self.sb.module.act_mono(&sm, &self.sb.module.gen_elt(b1));
            let right = self.sb.product_eval(&self.sb.module.gen_elt(b0), &bp)?;
            let w = self.tens(&aa, self.sb.module.fin_coords(&right));
            let tuple = vec![unit.clone(), kernel.mono_mul(h, &legs[0]), legs[1].clone()];
            lhs.add_term(&self.tmod, tuple, self.tmod.elt_scale(&w, &(c * sc)));
        }
        let mut rhs = PolyTensor::zero(3);
        for (legs, c) in kernel.mono_coproduct_legs(h, 3) {
            let (sm, sc) = kernel.mono_antipode(&legs[2]);
            let ap = self.sa.module.act_mono(&sm, &self.sa.module.gen_elt(a0));
            let left = self.sa.product_eval(&ap, &self.sa.module.gen_elt(a1))?;
            let w = self.tens(self.sa.module.fin_coords(&left), &bb);
            let tuple = vec![legs[0].clone(), kernel.mono_mul(g, &legs[1]), unit.clone()];
            rhs.add_term(&self.tmod, tuple, self.tmod.elt_scale(&w, &(c * sc)));
        }
        let diff = lhs.sub(&self.tmod, &rhs).straighten(&self.tmod);
        Ok((!diff.is_zero()).then(|| format!("difference {}", diff.fmt(&self.tmod))))
    }

    /// Second condition:
    /// Σ (1 ⊗ h·g₍₁₎ ⊗ f·g₍₂₎) ⊗ (a·a')⊗(b·(S(g₍₃₎)b'))
    ///   = Σ (f₍₁₎ ⊗ h ⊗ g·f₍₂₎) ⊗ ((S(f₍₃₎)a)·a')⊗(b·b').
    fn com2(&self, f: &Mono, g: &Mono, h: &Mono, q: [usize; 4]) -> Result<Option<String>> {
        let [a0, a1, b0, b1] = q;
        let kernel = &self.tmod.kernel;
        let aa = self.pa(a0, a1)?;
        let bb = self.pb(b0, b1)?;
        let mut lhs = PolyTensor::zero(3);
        for (legs, c) in kernel.mono_coproduct_legs(g, 3) {
            let (sm, sc) = kernel.mono_antipode(&legs[2]);
            let bp = self.sb.module.act_mono(&sm, &self.sb.module.gen_elt(b1));
            let right = self.sb.product_eval(&self.sb.module.gen_elt(b0), &bp)?;
            let w = self.tens(&aa, self.sb.module.fin_coords(&right));
            let tuple = vec![
                kernel.unit_mono(),
                kernel.mono_mul(h, &legs[0]),
                kernel.mono_mul(f, &legs[1]),
            ];
            lhs.add_term(&self.tmod, tuple, self.tmod.elt_scale(&w, &(c * sc)));
        }
        let mut rhs = PolyTensor::zero(3);
        for (legs, c) in kernel.mono_coproduct_legs(f, 3) {
            let (sm, sc) = kernel.mono_antipode(&legs[2]);
            let ap = self.sa.module.act_mono(&sm, &self.sa.module.gen_elt(a0));
            let left = self.sa.product_eval(&ap, &self.sa.module.gen_elt(a1))?;
            let w = self.tens(self.sa.module.fin_coords(&left), &bb);
            let tuple = vec![legs[0].clone(), h.clone(), kernel.mono_mul(g, &legs[1])];
            rhs.add_term(&self.tmod, tuple, self.tmod.elt_scale(&w, &(c * sc)));
        }
        let diff = lhs.sub(&self.tmod, &rhs).straighten(&self.tmod);
        Ok((!diff.is_zero()).then(|| format!("difference {}", diff.fmt(&self.tmod))))
    }

    /// Third condition:
    /// Σ (f·g₍₁₎ ⊗ h·g₍₂₎ ⊗ 1) ⊗ ((S(g₍₃₎)a)·a')⊗(b·b')
    ///   = Σ (g·f₍₁₎ ⊗ h ⊗ f₍₂₎) ⊗ (a·a')⊗(b·(S(f₍₃₎)b')).
    fn com3(&self, f: &Mono, g: &Mono, h: &Mono, q: [usize; 4]) -> Result<Option<String>> {
        let [a0, a1, b0, b1] = q;
        let kernel = &self.tmod.kernel;
        let aa = self.pa(a0, a1)?;
        let bb = self.pb(b0, b1)?;
        let mut lhs = PolyTensor::zero(3);
        for (legs, c) in kernel.mono_coproduct_legs(g, 3) {
            let (sm, sc) = kernel.mono_antipode(&legs[2]);
            let ap = self.sa.module.act_mono(&sm, &self.sa.module.gen_elt(a0));
            let left = self.sa.product_eval(&ap, &self.sa.module.gen_elt(a1))?;
            let w = self.tens(self.sa.module.fin_coords(&left), &bb);
            let tuple = vec![
                kernel.mono_mul(f, &legs[0]),
                kernel.mono_mul(h, &legs[1]),
                kernel.unit_mono(),
            ];
            lhs.add_term(&self.tmod, tuple, self.tmod.elt_scale(&w, &(c * sc)));
        }
        let mut rhs = PolyTensor::zero(3);
        for (legs, c) in kernel.mono_coproduct_legs(f, 3) {
            let (sm, sc) = kernel.mono_antipode(&legs[2]);
            let bp = self.sb.module.act_mono(&sm, &self.sb.module.gen_elt(b1));
            let right = self.sb.product_eval(&self.sb.module.gen_elt(b0), &bp)?;
            let w = self.tens(&aa, self.sb.module.fin_coords(&right));
            let tuple = vec![kernel.mono_mul(g, &legs[0]), h.clone(), legs[1].clone()];
            rhs.add_term(&self.tmod, tuple, self.tmod.elt_scale(&w, &(c * sc)));
        }
        let diff = lhs.sub(&self.tmod, &rhs).straighten(&self.tmod);
        Ok((!diff.is_zero()).then(|| format!("difference {}", diff.fmt(&self.tmod))))
    }

    /// Fourth condition, between plain elements of A⊗B:
    /// (a·(ha'))⊗(b·b') = (a·a')⊗(b·(hb')) = Σ (a·(h₍₁₎a'))⊗(b·(h₍₂₎b')).
    fn com4(&self, h: &Mono, q: [usize; 4]) -> Result<Option<String>> {
        let [a0, a1, b0, b1] = q;
        let kernel = &self.tmod.kernel;
        let ha = self.sa.module.act_mono(h, &self.sa.module.gen_elt(a1));
        let left = self.sa.product_eval(&self.sa.module.gen_elt(a0), &ha)?;
        let x1 = self.tens(self.sa.module.fin_coords(&left), &self.pb(b0, b1)?);
        let hb = self.sb.module.act_mono(h, &self.sb.module.gen_elt(b1));
        let right = self.sb.product_eval(&self.sb.module.gen_elt(b0), &hb)?;
        let x2 = self.tens(&self.pa(a0, a1)?, self.sb.module.fin_coords(&right));
        let mut x3 = self.tmod.zero_elt();
        for (legs, c) in kernel.mono_coproduct_legs(h, 2) {
            let ha = self.sa.module.act_mono(&legs[0], &self.sa.module.gen_elt(a1));
            let left = self.sa.product_eval(&self.sa.module.gen_elt(a0), &ha)?;
            let hb = self.sb.module.act_mono(&legs[1], &self.sb.module.gen_elt(b1));
            let right = self.sb.product_eval(&self.sb.module.gen_elt(b0), &hb)?;
            let w = self.tens(
                self.sa.module.fin_coords(&left),
                self.sb.module.fin_coords(&right),
            );
            x3 = self.tmod.elt_add(&x3, &self.tmod.elt_scale(&w, &c));
        }
        let d12 = self.tmod.elt_sub(&x1, &x2);
        let d23 = self.tmod.elt_sub(&x2, &x3);
        if self.tmod.elt_is_zero(&d12) && self.tmod.elt_is_zero(&d23) {
            return Ok(None);
        }
        let mut parts = Vec::new();
        if !self.tmod.elt_is_zero(&d12) {
            parts.push(format!("one-leg sides differ by {}", self.tmod.fmt_elt(&d12)));
        }
        if !self.tmod.elt_is_zero(&d23) {
            parts.push(format!("diagonal side differs by {}", self.tmod.fmt_elt(&d23)));
        }
        Ok(Some(parts.join("; ")))
    }
}

/// Checks the four compatibility conditions a pair of factors must satisfy
/// before their tensor product carries the combined structure. Both factors
/// must be finite-dimensional, graded commutative, with brackets of degree 0
/// and with explicit product and bracket tables (a zero table is fine, a
/// missing one is not).
pub fn check_tensor_compat(
    sa: &GradedPseudoStructure,
    sb: &GradedPseudoStructure,
) -> Result<Report> {
    let pa = sa.grading.as_ref().map(|g| g.p).unwrap_or(0);
    let pb = sb.grading.as_ref().map(|g| g.p).unwrap_or(0);
    if pa != 0 || pb != 0 {
        return Err(Error::Unsupported(format!(
            "the tensor product needs brackets of degree 0; got p = {} and p = {}",
            pa, pb
        )));
    }
    if sa.product.is_none() || sb.product.is_none() || sa.bracket.is_none() || sb.bracket.is_none()
    {
        return Err(Error::Unsupported(
            "tensor factors need explicit product and bracket tables; a zero table is fine, a missing one is not".into(),
        ));
    }
    let ctx = TensorCtx::new(sa.structure(), sb.structure())?;
    let mut report = Report::new("tensor");
    record_conventions(&mut report, sa.structure());
    report.convention(
        "tensor-quantification",
        "the compatibility conditions quantify over all of the kernel; they are checked on the \
         generators and the unit, which settles the general case because both sides are \
         multiplicative in each kernel argument",
    );
    {
        let section = report.section("factors");
        for s in [sa.structure(), sb.structure()] {
            let mut run = LawRun::new("factor-suite", &s.name);
            let failing = failing_laws(s, SuiteOptions { expect_commutative: true })?;
            let outcome = if failing.is_empty() {
                Ok(None)
            } else {
                Ok(Some(format!("fails {}", failing.join(", "))))
            };
            run.instance(|| "(full suite, commutativity expected)".into(), outcome)?;
            section.records.push(run.finish());
        }
    }
    let gens = gens_with_unit(&ctx.tmod.kernel);
    let quads: Vec<[usize; 4]> = (0..ctx.na)
        .flat_map(|a0| (0..ctx.na).map(move |a1| (a0, a1)))
        .flat_map(|(a0, a1)| {
            (0..ctx.nb).flat_map(move |b0| (0..ctx.nb).map(move |b1| [a0, a1, b0, b1]))
        })
        .collect();
    let kernel = ctx.tmod.kernel.clone();
    let subject = format!("{} (x) {}", sa.name, sb.name);
    let section = report.section("compatibility");
    let mut run = LawRun::new("tensor-compat-1", &subject);
    for g in &gens {
        for h in &gens {
            for q in &quads {
                run.instance(
                    || {
                        format!(
                            "g={}, h={} at (e{},e{};e{},e{})",
                            kernel.fmt_mono(g),
                            kernel.fmt_mono(h),
                            q[0] + 1,
                            q[1] + 1,
                            q[2] + 1,
                            q[3] + 1
                        )
                    },
                    ctx.com1(g, h, *q),
                )?;
            }
        }
    }
    section.records.push(run.finish());
    let mut run = LawRun::new("tensor-compat-2", &subject);
    for f in &gens {
        for g in &gens {
            for h in &gens {
                for q in &quads {
                    run.instance(
                        || {
                            format!(
                                "f={}, g={}, h={} at (e{},e{};e{},e{})",
                                kernel.fmt_mono(f),
                                kernel.fmt_mono(g),
                                kernel.fmt_mono(h),
                                q[0] + 1,
                                q[1] + 1,
                                q[2] + 1,
                                q[3] + 1
                            )
                        },
                        ctx.com2(f, g, h, *q),
                    )?;
                }
            }
        }
    }
    section.records.push(run.finish());
    let mut run = LawRun::new("tensor-compat-3", &subject);
    for f in &gens {
        for g in &gens {
            for h in &gens {
                for q in &quads {
                    run.instance(
                        || {
                            format!(
                                "f={}, g={}, h={} at (e{},e{};e{},e{})",
                                kernel.fmt_mono(f),
                                kernel.fmt_mono(g),
                                kernel.fmt_mono(h),
                                q[0] + 1,
                                q[1] + 1,
                                q[2] + 1,
                                q[3] + 1
                            )
                        },
                        ctx.com3(f, g, h, *q),
                    )?;
                }
            }
        }
    }
    section.records.push(run.finish());
    let mut run = LawRun::new("tensor-compat-4", &subject);
    for h in &gens {
        for q in &quads {
            run.instance(
                || {
                    format!(
                        "h={} at (e{},e{};e{},e{})",
                        kernel.fmt_mono(h),
                        q[0] + 1,
                        q[1] + 1,
                        q[2] + 1,
                        q[3] + 1
                    )
                },
                ctx.com4(h, *q),
            )?;
        }
    }
    section.records.push(run.finish());
    Ok(report)
}

/// Builds the tensor product structure once [`check_tensor_compat`] passes:
/// diagonal action, product (a⊗b)⋆(a'⊗b') = (−1)^{|a'||b|}(a·a')⊗(b·b'),
/// differential d(a⊗b) = d(a)⊗b + (−1)^{|a|}a⊗d(b), and the bracket whose
/// two contributions push each factor's bracket parts into the pair.
pub fn build_tensor(
    sa: &GradedPseudoStructure,
    sb: &GradedPseudoStructure,
) -> Result<GradedPseudoStructure> {
    let report = check_tensor_compat(sa, sb)?;
    if !report.passed() {
        let failing: Vec<String> = report
            .sections
            .iter()
            .flat_map(|s| &s.records)
            .filter(|r| !r.passed())
            .map(|r| r.law.clone())
            .collect();
        return Err(Error::InvalidTable(format!(
            "tensor factors violate: {}",
            failing.join(", ")
        )));
    }
    let ctx = TensorCtx::new(sa.structure(), sb.structure())?;
    let ga = sa.grading.as_ref().unwrap();
    let gb = sb.grading.as_ref().unwrap();
    let n = ctx.na * ctx.nb;
    let tmod = ctx.tmod.clone();
    let mut table = vec![vec![tmod.zero_elt(); n]; n];
    for a0 in 0..ctx.na {
        for b0 in 0..ctx.nb {
            for a1 in 0..ctx.na {
                for b1 in 0..ctx.nb {
                    let sign = sign_pow(ga.degree(a1) * gb.degree(b0));
                    let v = ctx.tens(&ctx.pa(a0, a1)?, &ctx.pb(b0, b1)?);
                    table[a0 * ctx.nb + b0][a1 * ctx.nb + b1] = tmod.elt_scale(&v, &sign);
                }
            }
        }
    }
    let bra = sa.bracket.as_ref().unwrap();
    let brb = sb.bracket.as_ref().unwrap();
    let mut entries = BTreeMap::new();
    for a0 in 0..ctx.na {
        for b0 in 0..ctx.nb {
            for a1 in 0..ctx.na {
                for b1 in 0..ctx.nb {
                    let sign = sign_pow(ga.degree(a1) * gb.degree(b0));
                    let mut t = PolyTensor::zero(2);
                    let ta = bra.entry(&sa.module, a0, a1)?;
                    let bbv = ctx.pb(b0, b1)?;
                    for (tuple, m) in ta.terms() {
                        let w = ctx.tens(sa.module.fin_coords(m), &bbv);
                        t.add_term(&tmod, tuple.clone(), w);
                    }
                    let tb = brb.entry(&sb.module, b0, b1)?;
                    let aav = ctx.pa(a0, a1)?;
                    for (tuple, m) in tb.terms() {
                        let w = ctx.tens(&aav, sb.module.fin_coords(m));
                        t.add_term(&tmod, tuple.clone(), w);
                    }
                    let t = t.scale(&tmod, &sign).straighten(&tmod);
                    if !t.is_zero() {
                        entries.insert((a0 * ctx.nb + b0, a1 * ctx.nb + b1), t);
                    }
                }
            }
        }
    }
    let mut columns = Vec::with_capacity(n);
    let mut degrees = Vec::with_capacity(n);
    for a0 in 0..ctx.na {
        for b0 in 0..ctx.nb {
            let da = sa.apply_d(&sa.module.gen_elt(a0));
            let db = sb.apply_d(&sb.module.gen_elt(b0));
            let left = ctx.tens(sa.module.fin_coords(&da), &basis_vec(ctx.nb, b0));
            let right = ctx.tens(&basis_vec(ctx.na, a0), sb.module.fin_coords(&db));
            let right = tmod.elt_scale(&right, &sign_pow(ga.degree(a0)));
            columns.push(tmod.elt_add(&left, &right));
            degrees.push(ga.degree(a0) + gb.degree(b0));
        }
    }
    let mut out = PseudoStructure::new(&format!("Ten({}, {})", sa.name, sb.name), tmod);
    out.product = Some(Product::table(table));
    out.bracket = Some(Bracket::new(entries));
    out.differential = Some(HMap { columns });
    out.grading = Some(Grading { degrees, p: 0 });
    GradedPseudoStructure::new(out)
}

/// Whether a span should be tested as a graded pseudosubalgebra or as a
/// pseudoideal. Both require d-closure; products and brackets close within
/// the span for `Sub` and against the whole structure for `Ideal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanMode {
    Sub,
    Ideal,
}

/// Span closure in a picture with finite k-dimension: the module itself when
/// finite-dimensional, the flattened picture for free modules over a group
/// kernel. `basis` holds the closure basis lifted back to the ambient
/// presentation.
struct FinSpan<'a> {
    module: &'a Module,
    fin: Module,
    group: Option<Vec<Mono>>,
    rref: SparseRref,
    basis: Vec<MElt>,
}

impl<'a> FinSpan<'a> {
    fn to_fin(&self, x: &MElt) -> MElt {
        match &self.group {
            Some(g) => self.module.elt_to_fin(g, x),
            None => x.clone(),
        }
    }

    fn contains(&self, x: &MElt) -> bool {
        let f = self.to_fin(x);
        self.rref.contains(&sparse_from_dense(self.fin.fin_coords(&f)))
    }

    /// Ambient elements spanning the whole structure over k: the generators
    /// themselves when finite-dimensional, group translates of them for a
    /// free module over a group kernel.
    fn ambient_basis(&self) -> Vec<MElt> {
        match &self.group {
            None => (0..self.fin.gens()).map(|i| self.module.gen_elt(i)).collect(),
            Some(_) => (0..self.fin.gens())
                .map(|t| self.from_fin(&self.fin.gen_elt(t)))
                .collect(),
        }
    }

    fn from_fin(&self, x: &MElt) -> MElt {
        match &self.group {
            Some(g) => self.module.elt_from_fin(g, x),
            None => x.clone(),
        }
    }
}

/// Closes a span under the kernel generator action by a worklist sweep; each
/// newly independent vector contributes its generator translates.
fn close_span<'a>(module: &'a Module, span: &[MElt]) -> Result<FinSpan<'a>> {
    let (fin, group) = match (&module.presentation, &module.kernel) {
        (Presentation::FiniteDim { .. }, _) => (module.clone(), None),
        (Presentation::Free { .. }, Kernel::Group { .. }) => {
            let (f, g) = module.finitize()?;
            (f, Some(g))
        }
        (Presentation::Free { .. }, Kernel::Polynomial { .. }) => {
            return Err(Error::Unsupported(
                "span closure over a polynomial kernel free module has no finite picture".into(),
            ))
        }
    };
    let mut out = FinSpan { module, fin, group, rref: SparseRref::new(), basis: Vec::new() };
    let mut queue: Vec<MElt> = span.iter().map(|x| out.to_fin(x)).collect();
    while let Some(v) = queue.pop() {
        let sv = sparse_from_dense(out.fin.fin_coords(&v));
        if out.rref.insert(&sv) {
            out.basis.push(out.from_fin(&v));
            for gi in 0..out.fin.kernel.gen_count() {
                queue.push(out.fin.act_mono(&out.fin.kernel.gen_mono(gi), &v));
            }
        }
    }
    Ok(out)
}

/// Tests whether every module part of a normal-form tensor lies in the span;
/// a straightened tensor's terms are independent, so part-wise membership is
/// membership in (H⊗H)⊗_H B.
fn tensor_parts_in(span: &FinSpan, t: &PolyTensor, module: &Module) -> Option<String> {
    for (_, m) in t.terms() {
        if !span.contains(m) {
            return Some(format!("part {} escapes the span", module.fmt_elt(m)));
        }
    }
    None
}

/// Checks whether the H-submodule generated by `span` is a graded
/// pseudosubalgebra (`Sub`) or pseudoideal (`Ideal`) of `s`: closure under
/// the differential, the product, and the bracket's module parts. Span
/// elements must be homogeneous. Free modules over the one-variable
/// polynomial kernel support `Sub` only, via k[∂]-span membership; their
/// ideal closures are never finite-dimensional.
pub fn check_subideal(s: &GradedPseudoStructure, span: &[MElt], mode: SpanMode) -> Result<Report> {
    let g = s.grading.as_ref().unwrap();
    for (k, x) in span.iter().enumerate() {
        g.elt_degree(&s.module, x).map_err(|_| {
            Error::InvalidGrading(format!(
                "span element {} is not homogeneous: {}",
                k + 1,
                s.module.fmt_elt(x)
            ))
        })?;
    }
    let mut report = Report::new("subideal");
    record_conventions(&mut report, s.structure());
    report.convention(
        "span-quantification",
        "closure is checked on a k-spanning set of the span's H-closure and on one of the whole \
         structure; k-bilinearity of the operations settles the rest",
    );
    match (&s.module.presentation, &s.module.kernel) {
        (Presentation::Free { .. }, Kernel::Polynomial { vars }) => {
            if mode == SpanMode::Ideal {
                return Err(Error::Unsupported(
                    "ideal testing over a polynomial kernel free module needs a finite closure, which does not exist".into(),
                ));
            }
            if *vars != 1 {
                return Err(Error::Unsupported(
                    "subalgebra testing over multivariate polynomial kernels is not modeled".into(),
                ));
            }
            poly_sub_check(s, span, &mut report)?;
        }
        _ => fin_subideal_check(s, span, mode, &mut report)?,
    }
    Ok(report)
}

fn fin_subideal_check(
    s: &GradedPseudoStructure,
    span: &[MElt],
    mode: SpanMode,
    report: &mut Report,
) -> Result<()> {
    let cl = close_span(&s.module, span)?;
    report.section("closure").notes.push(format!(
        "span closure has dimension {} of {}",
        cl.rref.rank(),
        cl.fin.gens()
    ));
    let prefix = match mode {
        SpanMode::Sub => "sub",
        SpanMode::Ideal => "ideal",
    };
    let subject = s.name.clone();
    let module = &s.module;
    let section = report.section("laws");
    let mut run = LawRun::new(&format!("{}-d-closed", prefix), &subject);
    for (t, v) in cl.basis.iter().enumerate() {
        let dv = s.apply_d(v);
        let outcome = if cl.contains(&dv) {
            Ok(None)
        } else {
            Ok(Some(format!("d(b{}) = {} escapes the span", t + 1, module.fmt_elt(&dv))))
        };
        run.instance(|| format!("(b{})", t + 1), outcome)?;
    }
    section.records.push(run.finish());
    let outer: Vec<MElt> = match mode {
        SpanMode::Sub => cl.basis.clone(),
        SpanMode::Ideal => cl.ambient_basis(),
    };
    if s.product.is_some() {
        let mut run = LawRun::new(&format!("{}-product-closed", prefix), &subject);
        for (i, a) in outer.iter().enumerate() {
            for (t, b) in cl.basis.iter().enumerate() {
                for (name, x, y) in [("a", a, b), ("b", b, a)] {
                    let outcome = (|| {
                        let p = s.product_eval(x, y)?;
                        if cl.contains(&p) {
                            Ok(None)
                        } else {
                            Ok(Some(format!("product {} escapes the span", module.fmt_elt(&p))))
                        }
                    })();
                    run.instance(|| format!("({}{}*b{})", name, i + 1, t + 1), outcome)?;
                }
            }
        }
        section.records.push(run.finish());
    }
    if s.bracket.is_some() {
        let mut run = LawRun::new(&format!("{}-bracket-closed", prefix), &subject);
        for (i, a) in outer.iter().enumerate() {
            for (t, b) in cl.basis.iter().enumerate() {
                for (name, x, y) in [("a", a, b), ("b", b, a)] {
                    let outcome = (|| {
                        let e = s.bracket_eval(x, y)?;
                        Ok(tensor_parts_in(&cl, &e, module))
                    })();
                    run.instance(|| format!("({{{}{}*b{}}})", name, i + 1, t + 1), outcome)?;
                }
            }
        }
        section.records.push(run.finish());
    }
    Ok(())
}

fn poly_sub_check(s: &GradedPseudoStructure, span: &[MElt], report: &mut Report) -> Result<()> {
    let rank = s.module.gens();
    let cols: Vec<Vec<UPoly>> = span.iter().map(melt_to_upvec).collect::<Result<_>>()?;
    let ech = upoly::col_echelon(rank, &cols);
    report.section("closure").notes.push(format!(
        "span closure is a k[{}]-module of rank {} of {}; action closure is automatic, the \
         action being multiplication",
        s.module.kernel.gen_name(0),
        ech.len(),
        rank
    ));
    let contains = |x: &MElt| -> Result<bool> {
        Ok(upoly::reduce_coords(&ech, &melt_to_upvec(x)?).is_some())
    };
    let subject = s.name.clone();
    let module = &s.module;
    let section = report.section("laws");
    let mut run = LawRun::new("sub-d-closed", &subject);
    for (t, v) in span.iter().enumerate() {
        let dv = s.apply_d(v);
        let outcome = (|| {
            if contains(&dv)? {
                Ok(None)
            } else {
                Ok(Some(format!("d(b{}) = {} escapes the span", t + 1, module.fmt_elt(&dv))))
            }
        })();
        run.instance(|| format!("(b{})", t + 1), outcome)?;
    }
    section.records.push(run.finish());
    if s.product.is_some() {
        let mut run = LawRun::new("sub-product-closed", &subject);
        for (i, a) in span.iter().enumerate() {
            for (j, b) in span.iter().enumerate() {
                let outcome = (|| {
                    let p = s.product_eval(a, b)?;
                    if contains(&p)? {
                        Ok(None)
                    } else {
                        Ok(Some(format!("product {} escapes the span", module.fmt_elt(&p))))
                    }
                })();
                run.instance(|| format!("(b{}*b{})", i + 1, j + 1), outcome)?;
            }
        }
        section.records.push(run.finish());
    }
    if s.bracket.is_some() {
        let mut run = LawRun::new("sub-bracket-closed", &subject);
        for (i, a) in span.iter().enumerate() {
            for (j, b) in span.iter().enumerate() {
                let outcome = (|| {
                    let e = s.bracket_eval(a, b)?;
                    for (_, m) in e.terms() {
                        if !contains(m)? {
                            return Ok(Some(format!(
                                "part {} escapes the span",
                                module.fmt_elt(m)
                            )));
                        }
                    }
                    Ok(None)
                })();
                run.instance(|| format!("({{b{}*b{}}})", i + 1, j + 1), outcome)?;
            }
        }
        section.records.push(run.finish());
    }
    Ok(())
}

/// A quotient structure along with the projection onto it.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub structure: GradedPseudoStructure,
    pub projection: HMap,
}

/// Quotients a finite-dimensional structure by the ideal generated by
/// `span`, after re-validating the ideal property. The quotient basis is the
/// set of generators free in the closure's row echelon form; products,
/// bracket parts, the differential, and the action are pushed through the
/// coordinate projection. Ideal closure preserves degrees, so the induced
/// grading is well defined.
pub fn build_quotient(s: &GradedPseudoStructure, span: &[MElt]) -> Result<Quotient> {
    if !matches!(s.module.presentation, Presentation::FiniteDim { .. }) {
        return Err(Error::Unsupported(
            "quotients are modeled on finite-dimensional structures".into(),
        ));
    }
    let check = check_subideal(s, span, SpanMode::Ideal)?;
    if !check.passed() {
        let failing: Vec<String> = check
            .sections
            .iter()
            .flat_map(|sec| &sec.records)
            .filter(|r| !r.passed())
            .map(|r| r.law.clone())
            .collect();
        return Err(Error::InvalidModule(format!(
            "the span is not an ideal of {}: {}",
            s.name,
            failing.join(", ")
        )));
    }
    let cl = close_span(&s.module, span)?;
    let n = s.module.gens();
    let g = s.grading.as_ref().unwrap();
    let free = cl.rref.free_indices(n);
    let q = free.len();
    let proj = |x: &MElt| -> Vec<Rat> {
        cl.rref.quotient_coords(&sparse_from_dense(s.module.fin_coords(x)), n)
    };
    let kernel = s.module.kernel.clone();
    let mut action = Vec::new();
    for gi in 0..kernel.gen_count() {
        let mono = kernel.gen_mono(gi);
        let cols: Vec<Vec<Rat>> = free
            .iter()
            .map(|&f| proj(&s.module.act_mono(&mono, &s.module.gen_elt(f))))
            .collect();
        action.push(mat_from_cols(q, &cols));
    }
    let qmod = Module::finite(&kernel, action)?;
    let mut out = PseudoStructure::new(&format!("Quo({})", s.name), qmod.clone());
    if s.product.is_some() {
        let mut table = vec![vec![qmod.zero_elt(); q]; q];
        for (t, &ft) in free.iter().enumerate() {
            for (u, &fu) in free.iter().enumerate() {
                let p = s.product_eval(&s.module.gen_elt(ft), &s.module.gen_elt(fu))?;
                table[t][u] = MElt::Fin(proj(&p));
            }
        }
        out.product = Some(Product::table(table));
    }
    if let Some(br) = &s.bracket {
        let mut entries = BTreeMap::new();
        for (t, &ft) in free.iter().enumerate() {
            for (u, &fu) in free.iter().enumerate() {
                let e = br.entry(&s.module, ft, fu)?;
                let mut qt = PolyTensor::zero(2);
                for (tuple, m) in e.terms() {
                    qt.add_term(&qmod, tuple.clone(), MElt::Fin(proj(m)));
                }
                let qt = qt.straighten(&qmod);
                if !qt.is_zero() {
                    entries.insert((t, u), qt);
                }
            }
        }
        out.bracket = Some(Bracket::new(entries));
    }
    let columns: Vec<MElt> = free
        .iter()
        .map(|&f| MElt::Fin(proj(&s.apply_d(&s.module.gen_elt(f)))))
        .collect();
    out.differential = Some(HMap { columns });
    out.grading = Some(Grading {
        degrees: free.iter().map(|&f| g.degree(f)).collect(),
        p: g.p,
    });
    let projection = HMap {
        columns: (0..n).map(|i| MElt::Fin(proj(&s.module.gen_elt(i)))).collect(),
    };
    Ok(Quotient { structure: GradedPseudoStructure::new(out)?, projection })
}

/// One cohomology degree of a free module over the one-variable polynomial
/// kernel: echelon cocycle basis, boundary coordinates in that basis, and
/// the split into rows covered by boundaries (a unit minor) and rows that
/// survive as classes.
#[derive(Debug)]
struct PolyBlock {
    degree: i64,
    zech: Vec<Vec<UPoly>>,
    ce: Vec<Vec<UPoly>>,
    unit_rows: Vec<usize>,
    rep_rows: Vec<usize>,
    offset: usize,
}

#[derive(Debug)]
enum CohProj {
    Fin { solver: Mat },
    Poly { blocks: Vec<PolyBlock> },
}

/// Cohomology of a graded structure: the induced structure on ker d/im d,
/// chosen cocycle representatives, and the projection sending a cocycle to
/// its class coordinates.
#[derive(Debug)]
pub struct Cohomology {
    pub structure: GradedPseudoStructure,
    pub reps: Vec<MElt>,
    proj: CohProj,
}

impl Cohomology {
    /// Class coordinates of a cocycle of the original structure, as an
    /// element of the cohomology module. Non-cocycles are refused.
    pub fn class_coords(&self, source: &PseudoStructure, x: &MElt) -> Result<MElt> {
        match &self.proj {
            CohProj::Fin { solver } => {
                let classes = self.structure.module.gens();
                let sol = solver.solve(source.module.fin_coords(x)).ok_or_else(|| {
                    Error::Model(format!(
                        "{} is not a cocycle of {}",
                        source.module.fmt_elt(x),
                        source.name
                    ))
                })?;
                Ok(MElt::Fin(sol[..classes].to_vec()))
            }
            CohProj::Poly { blocks } => {
                let g = source.grading_or_trivial();
                let mut out = vec![UPoly::zero(); self.structure.module.gens()];
                for (deg, part) in g.components(&source.module, x) {
                    let block = blocks.iter().find(|b| b.degree == deg).ok_or_else(|| {
                        Error::Model(format!("no cohomology block in degree {}", deg))
                    })?;
                    let coords = block_coords(block, &melt_to_upvec(&part)?, source)?;
                    for (t, c) in coords.into_iter().enumerate() {
                        out[block.offset + t] = out[block.offset + t].add(&c);
                    }
                }
                Ok(upvec_to_melt(&self.structure.module.kernel, &out))
            }
        }
    }
}

/// Coordinates of a homogeneous cocycle in one polynomial block: membership
/// in the echelon cocycle basis, then subtraction of the boundary reach. The
/// boundary system is solved by Cramer's rule on the unit-minor rows; its
/// determinant is a nonzero constant, so the division is exact.
fn block_coords(block: &PolyBlock, v: &[UPoly], source: &PseudoStructure) -> Result<Vec<UPoly>> {
    let y = upoly::reduce_coords(&block.zech, v).ok_or_else(|| {
        Error::Model(format!("a degree {} element is not a cocycle of {}", block.degree, source.name))
    })?;
    let t = block.ce.len();
    let mut resid = y.clone();
    if t > 0 {
        let sub: Vec<Vec<UPoly>> = block
            .ce
            .iter()
            .map(|c| block.unit_rows.iter().map(|&r| c[r].clone()).collect())
            .collect();
        let det = upoly::det(t, &sub);
        let dc = det.constant_value().expect("unit minor determinant is constant");
        let mut z = Vec::with_capacity(t);
        for j in 0..t {
            let mut rep = sub.clone();
            rep[j] = block.unit_rows.iter().map(|&r| y[r].clone()).collect();
            z.push(upoly::det(t, &rep).scale(&(rat(1) / &dc)));
        }
        for (j, zj) in z.iter().enumerate() {
            for r in 0..resid.len() {
                resid[r] = resid[r].sub(&block.ce[j][r].mul(zj));
            }
        }
    }
    Ok(block.rep_rows.iter().map(|&r| resid[r].clone()).collect())
}

/// Searches the row subsets of size `t` for one whose minor is a unit; such
/// a subset exists whenever the quotient by the boundary columns is free.
fn find_unit_rows(rows: usize, t: usize, ce: &[Vec<UPoly>]) -> Result<Vec<usize>> {
    if t == 0 {
        return Ok(Vec::new());
    }
    let mut combo: Vec<usize> = (0..t).collect();
    loop {
        let sub: Vec<Vec<UPoly>> = ce
            .iter()
            .map(|c| combo.iter().map(|&r| c[r].clone()).collect())
            .collect();
        if upoly::det(t, &sub).is_unit() {
            return Ok(combo);
        }
        // Advance to the next lexicographic combination of t rows.
        let mut i = t;
        loop {
            if i == 0 {
                return Err(Error::Model(
                    "no unit minor among the boundary rows despite a torsion-free quotient".into(),
                ));
            }
            i -= 1;
            if combo[i] + 1 <= rows - (t - i) {
                combo[i] += 1;
                for j in i + 1..t {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Builds the cohomology structure ker d/im d with its induced product,
/// bracket, and action, degree by degree. Finite-dimensional structures use
/// Gaussian elimination; free modules over the one-variable polynomial
/// kernel use column reduction over k[∂], refusing torsion quotients, which
/// neither module presentation can hold.
pub fn build_cohomology(s: &GradedPseudoStructure) -> Result<Cohomology> {
    require_laws("cohomology", s, SuiteOptions::default())?;
    match (&s.module.presentation, &s.module.kernel) {
        (Presentation::FiniteDim { .. }, _) => build_cohomology_fin(s),
        (Presentation::Free { .. }, Kernel::Polynomial { vars: 1 }) => build_cohomology_poly(s),
        (Presentation::Free { .. }, Kernel::Polynomial { .. }) => Err(Error::Unsupported(
            "cohomology over multivariate polynomial kernels is not modeled".into(),
        )),
        (Presentation::Free { .. }, Kernel::Group { .. }) => Err(Error::Unsupported(
            "cohomology of a free module over a group kernel: pass the finite-dimensional picture instead".into(),
        )),
    }
}

fn build_cohomology_fin(s: &GradedPseudoStructure) -> Result<Cohomology> {
    let module = &s.module;
    let n = module.gens();
    let g = s.grading.as_ref().unwrap();
    let dcols: Vec<Vec<Rat>> = (0..n)
        .map(|i| module.fin_coords(&s.apply_d(&module.gen_elt(i))).to_vec())
        .collect();
    let mut degs: Vec<i64> = g.degrees.clone();
    degs.sort();
    degs.dedup();
    let mut reps: Vec<MElt> = Vec::new();
    let mut rep_degs: Vec<i64> = Vec::new();
    for &dv in &degs {
        let idx: Vec<usize> = (0..n).filter(|&i| g.degree(i) == dv).collect();
        let block = mat_from_cols(n, &idx.iter().map(|&i| dcols[i].clone()).collect::<Vec<_>>());
        // Boundaries reaching this degree seed the rank so that only honest
        // classes survive the insert below.
        let mut work = SparseRref::new();
        for i in (0..n).filter(|&i| g.degree(i) == dv - 1) {
            work.insert(&sparse_from_dense(&dcols[i]));
        }
        for w in block.kernel_basis() {
            let mut v = vec![Rat::zero(); n];
            for (t, &i) in idx.iter().enumerate() {
                v[i] = w[t].clone();
            }
            if work.insert(&sparse_from_dense(&v)) {
                reps.push(MElt::Fin(v));
                rep_degs.push(dv);
            }
        }
    }
    let h = reps.len();
    let mut im_global = SparseRref::new();
    for c in &dcols {
        im_global.insert(&sparse_from_dense(c));
    }
    let mut solver_cols: Vec<Vec<Rat>> = reps.iter().map(|r| module.fin_coords(r).to_vec()).collect();
    for (_, row) in im_global.rows() {
        solver_cols.push(sparse_to_dense(row, n));
    }
    let solver = mat_from_cols(n, &solver_cols);
    let kernel = module.kernel.clone();
    let mut action = Vec::new();
    let class = |x: &MElt| -> Result<Vec<Rat>> {
        let sol = solver.solve(module.fin_coords(x)).ok_or_else(|| {
            Error::Model(format!("{} is not a cocycle of {}", module.fmt_elt(x), s.name))
        })?;
        Ok(sol[..h].to_vec())
    };
    for gi in 0..kernel.gen_count() {
        let mono = kernel.gen_mono(gi);
        let cols: Vec<Vec<Rat>> = reps
            .iter()
            .map(|r| class(&module.act_mono(&mono, r)))
            .collect::<Result<_>>()?;
        action.push(mat_from_cols(h, &cols));
    }
    let qmod = Module::finite(&kernel, action)?;
    let mut out = PseudoStructure::new(&format!("H({})", s.name), qmod.clone());
    if s.product.is_some() {
        let mut table = vec![vec![qmod.zero_elt(); h]; h];
        for t in 0..h {
            for u in 0..h {
                let p = s.product_eval(&reps[t], &reps[u])?;
                table[t][u] = MElt::Fin(class(&p)?);
            }
        }
        out.product = Some(Product::table(table));
    }
    if s.bracket.is_some() {
        let mut entries = BTreeMap::new();
        for t in 0..h {
            for u in 0..h {
                let e = s.bracket_eval(&reps[t], &reps[u])?;
                let mut qt = PolyTensor::zero(2);
                for (tuple, m) in e.terms() {
                    // Straight terms are independent, and d leaves tuples
                    // alone, so each part of a cocycle bracket is a cocycle.
                    qt.add_term(&qmod, tuple.clone(), MElt::Fin(class(m)?));
                }
                let qt = qt.straighten(&qmod);
                if !qt.is_zero() {
                    entries.insert((t, u), qt);
                }
            }
        }
        out.bracket = Some(Bracket::new(entries));
    }
    out.differential = Some(HMap::zero(&qmod, &qmod));
    out.grading = Some(Grading { degrees: rep_degs, p: g.p });
    Ok(Cohomology {
        structure: GradedPseudoStructure::new(out)?,
        reps,
        proj: CohProj::Fin { solver },
    })
}

fn build_cohomology_poly(s: &GradedPseudoStructure) -> Result<Cohomology> {
    let module = &s.module;
    let rank = module.gens();
    let g = s.grading.as_ref().unwrap();
    let kernel = module.kernel.clone();
    let dcols: Vec<Vec<UPoly>> = (0..rank)
        .map(|i| melt_to_upvec(&s.apply_d(&module.gen_elt(i))))
        .collect::<Result<_>>()?;
    let mut degs: Vec<i64> = g.degrees.clone();
    degs.sort();
    degs.dedup();
    let mut blocks = Vec::new();
    let mut reps: Vec<MElt> = Vec::new();
    let mut rep_degs: Vec<i64> = Vec::new();
    let mut offset = 0;
    for &dv in &degs {
        let idx: Vec<usize> = (0..rank).filter(|&i| g.degree(i) == dv).collect();
        let block_cols: Vec<Vec<UPoly>> = idx.iter().map(|&i| dcols[i].clone()).collect();
        let (kernel_coords, _) = upoly::kernel_and_image(rank, &block_cols);
        let zcols: Vec<Vec<UPoly>> = kernel_coords
            .iter()
            .map(|w| {
                let mut v = vec![UPoly::zero(); rank];
                for (t, &i) in idx.iter().enumerate() {
                    v[i] = w[t].clone();
                }
                v
            })
            .collect();
        let zech = upoly::col_echelon(rank, &zcols);
        let bcols: Vec<Vec<UPoly>> = (0..rank)
            .filter(|&i| g.degree(i) == dv - 1)
            .map(|i| dcols[i].clone())
            .filter(|c| c.iter().any(|p| !p.is_zero()))
            .collect();
        let bech = upoly::col_echelon(rank, &bcols);
        let ce_raw: Vec<Vec<UPoly>> = bech
            .iter()
            .map(|b| {
                upoly::reduce_coords(&zech, b).ok_or_else(|| {
                    Error::Model("a boundary escapes the cocycles; d does not square to zero".into())
                })
            })
            .collect::<Result<_>>()?;
        let zn = zech.len();
        let ce = upoly::col_echelon(zn, &ce_raw);
        for div in upoly::diagonal_divisors(zn, &ce) {
            if !div.is_zero() && !div.is_unit() {
                return Err(Error::Unsupported(format!(
                    "cohomology in degree {} has torsion annihilated by {}; the quotient is not a free module",
                    dv,
                    div.to_hopf(&kernel)
                )));
            }
        }
        let t = ce.len();
        let unit_rows = find_unit_rows(zn, t, &ce)?;
        let rep_rows: Vec<usize> = (0..zn).filter(|r| !unit_rows.contains(r)).collect();
        for &j in &rep_rows {
            reps.push(upvec_to_melt(&kernel, &zech[j]));
            rep_degs.push(dv);
        }
        let len = rep_rows.len();
        blocks.push(PolyBlock { degree: dv, zech, ce, unit_rows, rep_rows, offset });
        offset += len;
    }
    let h = reps.len();
    let qmod = Module::free(&kernel, h);
    let mut out = PseudoStructure::new(&format!("H({})", s.name), qmod.clone());
    let coh = Cohomology {
        structure: GradedPseudoStructure::new({
            let mut t = out.clone();
            t.differential = Some(HMap::zero(&qmod, &qmod));
            t.grading = Some(Grading { degrees: rep_degs.clone(), p: g.p });
            t
        })?,
        reps: reps.clone(),
        proj: CohProj::Poly { blocks },
    };
    if s.product.is_some() {
        let mut sc = vec![vec![vec![Rat::zero(); h]; h]; h];
        for t in 0..h {
            for u in 0..h {
                let p = s.product_eval(&reps[t], &reps[u])?;
                let c = coh.class_coords(s.structure(), &p)?;
                let MElt::Free(v) = c else { unreachable!() };
                for (k, hp) in v.iter().enumerate() {
                    let up = UPoly::from_hopf(hp)?;
                    match up.constant_value() {
                        Some(cv) => sc[t][u][k] = cv,
                        None => {
                            return Err(Error::Unsupported(format!(
                                "the induced product constant at (e{},e{}) is {}, not a scalar; \
                                 first-slot structure constants cannot hold it",
                                t + 1,
                                u + 1,
                                hp
                            )))
                        }
                    }
                }
            }
        }
        out.product = Some(Product::first_slot(sc));
    }
    if s.bracket.is_some() {
        let mut entries = BTreeMap::new();
        for t in 0..h {
            for u in 0..h {
                let e = s.bracket_eval(&reps[t], &reps[u])?;
                let mut qt = PolyTensor::zero(2);
                for (tuple, m) in e.terms() {
                    qt.add_term(&qmod, tuple.clone(), coh.class_coords(s.structure(), m)?);
                }
                let qt = qt.straighten(&qmod);
                if !qt.is_zero() {
                    entries.insert((t, u), qt);
                }
            }
        }
        out.bracket = Some(Bracket::new(entries));
    }
    out.differential = Some(HMap::zero(&qmod, &qmod));
    out.grading = Some(Grading { degrees: rep_degs, p: g.p });
    Ok(Cohomology {
        structure: GradedPseudoStructure::new(out)?,
        reps,
        proj: coh.proj,
    })
}

/// The map induced on cohomology by a homomorphism: each representative is
/// pushed through and projected onto classes.
pub fn induced_map(
    source: &GradedPseudoStructure,
    target: &GradedPseudoStructure,
    cs: &Cohomology,
    ct: &Cohomology,
    map: &HMap,
) -> Result<HMap> {
    let mut columns = Vec::with_capacity(cs.reps.len());
    for rep in &cs.reps {
        let img = map.apply(&source.module, &target.module, rep);
        columns.push(ct.class_coords(target.structure(), &img)?);
    }
    Ok(HMap { columns })
}

/// A candidate homomorphism between graded structures.
#[derive(Debug, Clone)]
pub struct HomCandidate<'a> {
    pub source: &'a GradedPseudoStructure,
    pub target: &'a GradedPseudoStructure,
    pub map: HMap,
    pub name: String,
}

/// Law records for the homomorphism conditions, plus a classification note
/// when the presentations admit an exact rank computation.
fn hom_records(c: &HomCandidate) -> Result<(Vec<LawRecord>, Option<String>)> {
    let sm = &c.source.module;
    let tm = &c.target.module;
    if sm.kernel != tm.kernel {
        return Err(Error::KernelMismatch(
            "homomorphism endpoints live over different kernels".into(),
        ));
    }
    if c.map.columns.len() != sm.gens() {
        return Err(Error::InvalidMap(format!(
            "map lists {} columns for {} source generators",
            c.map.columns.len(),
            sm.gens()
        )));
    }
    let sg = c.source.grading.as_ref().unwrap();
    let tg = c.target.grading.as_ref().unwrap();
    let mut records = Vec::new();
    let mut run = LawRun::new("hom-degree", &c.name);
    run.instance(
        || "(action)".into(),
        Ok(c.map.validate(sm, tm).err().map(|e| e.to_string())),
    )?;
    let shift_outcome = match c.map.degree_shift(sm, tm, sg, tg) {
        Ok(None) | Ok(Some(0)) => Ok(None),
        Ok(Some(k)) => Ok(Some(format!("shifts degree by {}", k))),
        Err(e) => Ok(Some(e.to_string())),
    };
    run.instance(|| "(shift)".into(), shift_outcome)?;
    records.push(run.finish());
    let apply = |x: &MElt| c.map.apply(sm, tm, x);
    match (&c.source.product, &c.target.product) {
        (None, None) => {}
        (Some(_), Some(_)) => {
            let mut run = LawRun::new("hom-product", &c.name);
            for i in 0..sm.gens() {
                for j in 0..sm.gens() {
                    let outcome = (|| {
                        let lhs = apply(&c.source.product_eval(&sm.gen_elt(i), &sm.gen_elt(j))?);
                        let rhs = c
                            .target
                            .product_eval(&apply(&sm.gen_elt(i)), &apply(&sm.gen_elt(j)))?;
                        let diff = tm.elt_sub(&lhs, &rhs);
                        Ok((!tm.elt_is_zero(&diff))
                            .then(|| format!("difference {}", tm.fmt_elt(&diff))))
                    })();
                    run.instance(|| format!("(e{}*e{})", i + 1, j + 1), outcome)?;
                }
            }
            records.push(run.finish());
        }
        _ => {
            let mut run = LawRun::new("hom-product", &c.name);
            run.instance(
                || "(presence)".into(),
                Ok(Some("only one side has a product table".into())),
            )?;
            records.push(run.finish());
        }
    }
    match (&c.source.bracket, &c.target.bracket) {
        (None, None) => {}
        (Some(_), Some(_)) => {
            let mut run = LawRun::new("hom-bracket", &c.name);
            for i in 0..sm.gens() {
                for j in 0..sm.gens() {
                    let outcome = (|| {
                        let e = c.source.bracket_eval(&sm.gen_elt(i), &sm.gen_elt(j))?;
                        let lhs = push_tensor(sm, tm, &c.map, &e);
                        let rhs = c
                            .target
                            .bracket_eval(&apply(&sm.gen_elt(i)), &apply(&sm.gen_elt(j)))?;
                        let diff = lhs.sub(tm, &rhs).straighten(tm);
                        Ok((!diff.is_zero()).then(|| format!("difference {}", diff.fmt(tm))))
                    })();
                    run.instance(|| format!("({{e{}*e{}}})", i + 1, j + 1), outcome)?;
                }
            }
            records.push(run.finish());
        }
        _ => {
            let mut run = LawRun::new("hom-bracket", &c.name);
            run.instance(
                || "(presence)".into(),
                Ok(Some("only one side has a bracket table".into())),
            )?;
            records.push(run.finish());
        }
    }
    let mut run = LawRun::new("hom-d", &c.name);
    for i in 0..sm.gens() {
        let lhs = apply(&c.source.apply_d(&sm.gen_elt(i)));
        let rhs = c.target.apply_d(&apply(&sm.gen_elt(i)));
        let diff = tm.elt_sub(&lhs, &rhs);
        let outcome =
            Ok((!tm.elt_is_zero(&diff)).then(|| format!("difference {}", tm.fmt_elt(&diff))));
        run.instance(|| format!("(d e{})", i + 1), outcome)?;
    }
    records.push(run.finish());
    let note = classify_map(sm, tm, &c.map)?.map(|(mono, epi)| {
        let word = match (mono, epi) {
            (true, true) => "iso",
            (true, false) => "mono, not epi",
            (false, true) => "epi, not mono",
            (false, false) => "neither mono nor epi",
        };
        format!("classification: {}", word)
    });
    Ok((records, note))
}

/// Injectivity and surjectivity by exact rank computation; `None` when the
/// presentation pair has no such computation here (mixed presentations,
/// multivariate polynomial kernels).
fn classify_map(source: &Module, target: &Module, map: &HMap) -> Result<Option<(bool, bool)>> {
    match (&source.presentation, &target.presentation) {
        (Presentation::FiniteDim { .. }, Presentation::FiniteDim { .. }) => {
            let m = map.matrix(target);
            let r = m.rank();
            Ok(Some((r == source.gens(), r == target.gens())))
        }
        (Presentation::Free { .. }, Presentation::Free { .. }) => match &source.kernel {
            Kernel::Polynomial { vars: 1 } => {
                let rows = target.gens();
                let cols: Vec<Vec<UPoly>> =
                    map.columns.iter().map(melt_to_upvec).collect::<Result<_>>()?;
                let (ker, _) = upoly::kernel_and_image(rows, &cols);
                let divisors = upoly::diagonal_divisors(rows, &cols);
                let epi = divisors.len() == rows && divisors.iter().all(UPoly::is_unit);
                Ok(Some((ker.is_empty(), epi)))
            }
            Kernel::Polynomial { .. } => Ok(None),
            Kernel::Group { .. } => {
                let (sfin, sgroup) = source.finitize()?;
                let (tfin, tgroup) = target.finitize()?;
                let mut cols = Vec::new();
                for i in 0..source.gens() {
                    for gm in &sgroup {
                        let x = source.act_mono(gm, &source.gen_elt(i));
                        let img = map.apply(source, target, &x);
                        let fin = target.elt_to_fin(&tgroup, &img);
                        cols.push(tfin.fin_coords(&fin).to_vec());
                    }
                }
                let m = mat_from_cols(tfin.gens(), &cols);
                let r = m.rank();
                Ok(Some((r == sfin.gens(), r == tfin.gens())))
            }
        },
        _ => Ok(None),
    }
}

/// Checks the homomorphism conditions on every generator pair: degree and
/// H-linearity, compatibility with products, with brackets (the map applied
/// to the module parts of the normal form), and with the differentials.
/// Generator pairs determine the general case by H-(bi)linearity.
pub fn check_homomorphism(c: &HomCandidate) -> Result<Report> {
    let mut report = Report::new("check-hom");
    record_conventions(&mut report, c.source.structure());
    report.convention(
        "hom-quantification",
        "the homomorphism conditions are checked on generator pairs, which settles the general \
         case by H-linearity of the map and H-(bi)linearity of the operations",
    );
    let (records, note) = hom_records(c)?;
    let section = report.section("conditions");
    section.records = records;
    if let Some(n) = note {
        section.notes.push(n);
    }
    Ok(report)
}

/// Checks that a homomorphism `map: s → t` induces a well-defined map on
/// cohomology and that the induced map is again a homomorphism; when `map`
/// is an isomorphism the induced map is one too, which the `induced-bijective`
/// law records.
pub fn check_cohomology_invariance(
    s: &GradedPseudoStructure,
    t: &GradedPseudoStructure,
    map: &HMap,
) -> Result<Report> {
    let mut report = Report::new("cohomology");
    record_conventions(&mut report, s.structure());
    let given = HomCandidate { source: s, target: t, map: map.clone(), name: "given map".into() };
    let (records, note) = hom_records(&given)?;
    let given_ok = records.iter().all(|r| r.passed());
    {
        let section = report.section("given-map");
        section.records = records;
        if let Some(n) = note {
            section.notes.push(n);
        }
    }
    if !given_ok {
        report
            .section("induced-map")
            .notes
            .push("skipped: the given map is not a homomorphism".into());
        return Ok(report);
    }
    let cs = build_cohomology(s)?;
    let ct = build_cohomology(t)?;
    let ind = induced_map(s, t, &cs, &ct, map)?;
    let cand = HomCandidate {
        source: &cs.structure,
        target: &ct.structure,
        map: ind.clone(),
        name: "induced map".into(),
    };
    let (records, note) = hom_records(&cand)?;
    let section = report.section("induced-map");
    section.records = records;
    if let Some(n) = note {
        section.notes.push(n);
    }
    let mut run = LawRun::new("induced-bijective", "induced map");
    let outcome = match classify_map(&cs.structure.module, &ct.structure.module, &ind)? {
        Some((true, true)) => Ok(None),
        Some((mono, epi)) => Ok(Some(format!(
            "induced map is {}",
            match (mono, epi) {
                (true, false) => "mono but not epi",
                (false, true) => "epi but not mono",
                _ => "neither mono nor epi",
            }
        ))),
        None => Err(Error::OutOfRange("no rank computation for this presentation".into())),
    };
    run.instance(|| "(rank)".into(), outcome)?;
    section.records.push(run.finish());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::HopfElement;
    use crate::report::Verdict;

    fn triv() -> Kernel {
        Kernel::Group { orders: vec![1] }
    }

    fn z2() -> Kernel {
        Kernel::Group { orders: vec![2] }
    }

    fn poly1() -> Kernel {
        Kernel::Polynomial { vars: 1 }
    }

    fn unit_tensor(module: &Module, m: MElt) -> PolyTensor {
        let unit = module.kernel.unit_mono();
        PolyTensor::from_term(module, vec![unit.clone(), unit], m)
    }

    fn find_record<'a>(report: &'a Report, law: &str) -> &'a LawRecord {
        report
            .sections
            .iter()
            .flat_map(|s| s.records.iter())
            .find(|r| r.law == law)
            .unwrap_or_else(|| panic!("no record for {}", law))
    }

    fn assert_suite_passes(s: &PseudoStructure, opts: SuiteOptions) {
        let failing = failing_laws(s, opts).unwrap();
        assert!(failing.is_empty(), "{} fails {:?}", s.name, failing);
    }

    /// Two-term complex over the trivial kernel: d(e1) = e2, zero product,
    /// bracket {e1*e2} = (1(x)1)(x)e2 and its skew partner.
    fn eps_complex() -> GradedPseudoStructure {
        let kernel = triv();
        let module = Module::finite(&kernel, vec![Mat::identity(2)]).unwrap();
        let mut s = PseudoStructure::new("E", module.clone());
        s.product = Some(Product::table(vec![vec![module.zero_elt(); 2]; 2]));
        let t = unit_tensor(&module, MElt::Fin(vec![rat(0), rat(1)]));
        let mut entries = BTreeMap::new();
        entries.insert((0, 1), t.clone());
        entries.insert((1, 0), t.scale(&module, &rat(-1)));
        s.bracket = Some(Bracket::new(entries));
        s.differential = Some(HMap { columns: vec![module.gen_elt(1), module.zero_elt()] });
        s.grading = Some(Grading { degrees: vec![0, 1], p: 0 });
        GradedPseudoStructure::new(s).unwrap()
    }

    /// Two-term complex over k[Z/2] where the group generator acts by -1 on
    /// both generators; zero product and bracket tables.
    fn sign_complex() -> GradedPseudoStructure {
        let kernel = z2();
        let module = Module::finite(&kernel, vec![Mat::identity(2).scale(&rat(-1))]).unwrap();
        let mut s = PseudoStructure::new("Sgn", module.clone());
        s.product = Some(Product::table(vec![vec![module.zero_elt(); 2]; 2]));
        s.bracket = Some(Bracket::new(BTreeMap::new()));
        s.differential = Some(HMap { columns: vec![module.gen_elt(1), module.zero_elt()] });
        s.grading = Some(Grading { degrees: vec![0, 1], p: 0 });
        GradedPseudoStructure::new(s).unwrap()
    }

    /// Exterior algebra on one odd generator over the trivial kernel:
    /// e1 the unit, e2 odd with e2*e2 = 0; zero bracket and differential.
    fn exterior() -> GradedPseudoStructure {
        let kernel = triv();
        let module = Module::finite(&kernel, vec![Mat::identity(2)]).unwrap();
        let mut s = PseudoStructure::new("Ext", module.clone());
        let table = vec![
            vec![module.gen_elt(0), module.gen_elt(1)],
            vec![module.gen_elt(1), module.zero_elt()],
        ];
        s.product = Some(Product::table(table));
        s.bracket = Some(Bracket::new(BTreeMap::new()));
        s.differential = Some(HMap::zero(&module, &module));
        s.grading = Some(Grading { degrees: vec![0, 1], p: 0 });
        GradedPseudoStructure::new(s).unwrap()
    }

    /// Truncated polynomials k[t]/t^3 over k[d1] with d1 acting as d/dt;
    /// ungraded degrees, zero bracket and differential.
    fn truncated_poly_algebra() -> GradedPseudoStructure {
        let kernel = poly1();
        let action = Mat::from_rows(vec![
            vec![rat(0), rat(1), rat(0)],
            vec![rat(0), rat(0), rat(2)],
            vec![rat(0), rat(0), rat(0)],
        ]);
        let module = Module::finite(&kernel, vec![action]).unwrap();
        let mut s = PseudoStructure::new("T3", module.clone());
        let z = module.zero_elt();
        let table = vec![
            vec![module.gen_elt(0), module.gen_elt(1), module.gen_elt(2)],
            vec![module.gen_elt(1), module.gen_elt(2), z.clone()],
            vec![module.gen_elt(2), z.clone(), z.clone()],
        ];
        s.product = Some(Product::table(table));
        s.bracket = Some(Bracket::new(BTreeMap::new()));
        s.differential = Some(HMap::zero(&module, &module));
        s.grading = Some(Grading { degrees: vec![0, 0, 0], p: 0 });
        GradedPseudoStructure::new(s).unwrap()
    }

    /// One-dimensional unital algebra over the given kernel with the zero
    /// action on the generator.
    fn unital_line(kernel: &Kernel) -> GradedPseudoStructure {
        let per_gen = match kernel {
            Kernel::Group { .. } => Mat::identity(1),
            Kernel::Polynomial { .. } => Mat::zero(1, 1),
        };
        let module = Module::finite(kernel, vec![per_gen; kernel.gen_count()]).unwrap();
        let mut s = PseudoStructure::new("Line", module.clone());
        s.product = Some(Product::table(vec![vec![module.gen_elt(0)]]));
        s.bracket = Some(Bracket::new(BTreeMap::new()));
        s.differential = Some(HMap::zero(&module, &module));
        s.grading = Some(Grading { degrees: vec![0], p: 0 });
        GradedPseudoStructure::new(s).unwrap()
    }

    /// Three generators over the trivial kernel with the odd-free bracket
    /// {e1*e2} = (1(x)1)(x)e3 and zero product and differential.
    fn heisenberg() -> GradedPseudoStructure {
        let kernel = triv();
        let module = Module::finite(&kernel, vec![Mat::identity(3)]).unwrap();
        let mut s = PseudoStructure::new("Heis", module.clone());
        let t = unit_tensor(&module, module.gen_elt(2));
        let mut entries = BTreeMap::new();
        entries.insert((0, 1), t.clone());
        entries.insert((1, 0), t.scale(&module, &rat(-1)));
        s.bracket = Some(Bracket::new(entries));
        s.differential = Some(HMap::zero(&module, &module));
        s.grading = Some(Grading { degrees: vec![0, 0, 0], p: 0 });
        GradedPseudoStructure::new(s).unwrap()
    }

    /// d(e1) = scale * e2 on a three-step grading over the trivial kernel.
    fn d_line(scale: i64) -> GradedPseudoStructure {
        let kernel = triv();
        let module = Module::finite(&kernel, vec![Mat::identity(3)]).unwrap();
        let mut s = PseudoStructure::new(&format!("L{}", scale), module.clone());
        s.differential = Some(HMap {
            columns: vec![
                MElt::Fin(vec![rat(0), rat(scale), rat(0)]),
                module.zero_elt(),
                module.zero_elt(),
            ],
        });
        s.grading = Some(Grading { degrees: vec![0, 1, 2], p: 0 });
        GradedPseudoStructure::new(s).unwrap()
    }

    fn diag_map(module: &Module, entries: &[i64]) -> HMap {
        HMap {
            columns: entries
                .iter()
                .enumerate()
                .map(|(i, &c)| module.elt_scale(&module.gen_elt(i), &rat(c)))
                .collect(),
        }
    }

    #[test]
    fn sign_conventions_match_hand_tables() {
        // (-1)^{|a|} over degrees -2..3.
        let expect = [1, -1, 1, -1, 1, -1];
        for (k, d) in (-2..4).enumerate() {
            assert_eq!(sign_pow(d), rat(expect[k]), "degree {}", d);
        }
        // (-1)^{|a|+p} at p = 1 shifts the table by one.
        for (k, d) in (-2..4).enumerate() {
            assert_eq!(sign_pow(d + 1), rat(-expect[k]), "degree {} shifted", d);
        }
        // (-1)^{(|a|+p)(|b|+p)} at p = 0 on degrees {0,1}.
        let table = [[1, 1], [1, -1]];
        for a in 0..2i64 {
            for b in 0..2i64 {
                assert_eq!(sign_pow(a * b), rat(table[a as usize][b as usize]));
            }
        }
    }

    #[test]
    fn constructor_rejects_missing_or_misbehaving_differentials() {
        let kernel = triv();
        let module = Module::finite(&kernel, vec![Mat::identity(2)]).unwrap();
        let mut s = PseudoStructure::new("NoG", module.clone());
        s.differential = Some(HMap::zero(&module, &module));
        assert!(matches!(GradedPseudoStructure::new(s), Err(Error::InvalidGrading(_))));
        let mut s = PseudoStructure::new("NoD", module.clone());
        s.grading = Some(Grading { degrees: vec![0, 1], p: 0 });
        assert!(matches!(GradedPseudoStructure::new(s), Err(Error::InvalidMap(_))));
        // d(e1) = e2 with both generators in degree 0 shifts by 0, not 1.
        let mut s = PseudoStructure::new("Shift", module.clone());
        s.differential = Some(HMap { columns: vec![module.gen_elt(1), module.zero_elt()] });
        s.grading = Some(Grading { degrees: vec![0, 0], p: 0 });
        assert!(matches!(GradedPseudoStructure::new(s), Err(Error::InvalidMap(_))));
        // d(e1) = e2, d(e2) = e3 does not square to zero.
        let module3 = Module::finite(&kernel, vec![Mat::identity(3)]).unwrap();
        let mut s = PseudoStructure::new("D2", module3.clone());
        s.differential = Some(HMap {
            columns: vec![module3.gen_elt(1), module3.gen_elt(2), module3.zero_elt()],
        });
        s.grading = Some(Grading { degrees: vec![0, 1, 2], p: 0 });
        let err = GradedPseudoStructure::new(s).unwrap_err();
        assert!(err.to_string().contains("square to zero"), "{}", err);
    }

    #[test]
    fn opposite_negates_the_bracket_entry() {
        let s = eps_complex();
        let op = build_opposite(&s).unwrap();
        let expected = unit_tensor(&s.module, MElt::Fin(vec![rat(0), rat(-1)]));
        assert_eq!(op.bracket.as_ref().unwrap().entries[&(0, 1)], expected);
        assert_suite_passes(op.structure(), SuiteOptions::default());
        let back = build_opposite(&op).unwrap();
        assert_eq!(
            back.bracket.as_ref().unwrap().entries,
            s.bracket.as_ref().unwrap().entries
        );
    }

    #[test]
    fn opposite_of_a_zero_bracket_equals_the_original() {
        let s = exterior();
        let op = build_opposite(&s).unwrap();
        assert!(op.bracket.as_ref().unwrap().entries.is_empty());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(
                    op.product_eval(&op.module.gen_elt(i), &op.module.gen_elt(j)).unwrap(),
                    s.product_eval(&s.module.gen_elt(i), &s.module.gen_elt(j)).unwrap()
                );
            }
        }
    }

    #[test]
    fn opposite_refuses_a_law_breaking_input() {
        let kernel = triv();
        let module = Module::finite(&kernel, vec![Mat::identity(1)]).unwrap();
        let mut s = PseudoStructure::new("Bad", module.clone());
        let mut entries = BTreeMap::new();
        // {e1*e1} symmetric in even degree violates skew-symmetry.
        entries.insert((0, 0), unit_tensor(&module, module.gen_elt(0)));
        s.bracket = Some(Bracket::new(entries));
        s.differential = Some(HMap::zero(&module, &module));
        s.grading = Some(Grading { degrees: vec![0], p: 0 });
        let g = GradedPseudoStructure::new(s).unwrap();
        let err = build_opposite(&g).unwrap_err();
        assert!(err.to_string().contains("skew-symmetry"), "{}", err);
    }

    #[test]
    fn counit_action_with_unit_bracket_coefficients_passes_all_conditions() {
        let a = eps_complex();
        let report = check_tensor_compat(&a, &a).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        for k in 1..=4 {
            assert_eq!(find_record(&report, &format!("tensor-compat-{}", k)).verdict, Verdict::Pass);
        }
        let ten = build_tensor(&a, &a).unwrap();
        assert_eq!(ten.module.gens(), 4);
        assert_eq!(ten.grading.as_ref().unwrap().degrees, vec![0, 1, 1, 2]);
        // Koszul columns: d(e1(x)e1) = e2(x)e1 + e1(x)e2, and the odd first
        // leg flips the sign of the second contribution.
        let d = ten.differential.as_ref().unwrap();
        assert_eq!(d.columns[0], MElt::Fin(vec![rat(0), rat(1), rat(1), rat(0)]));
        assert_eq!(d.columns[1], MElt::Fin(vec![rat(0), rat(0), rat(0), rat(1)]));
        assert_eq!(d.columns[2], MElt::Fin(vec![rat(0), rat(0), rat(0), rat(-1)]));
        assert_eq!(d.columns[3], MElt::Fin(vec![rat(0); 4]));
        // Zero factor products pull every bracket contribution to zero.
        assert!(ten.bracket.as_ref().unwrap().entries.is_empty());
        assert_suite_passes(ten.structure(), SuiteOptions { expect_commutative: true });
    }

    #[test]
    fn sign_action_tensor_square_carries_the_diagonal_action() {
        let a = sign_complex();
        let ten = build_tensor(&a, &a).unwrap();
        // (-1)(x)(-1) = +1 on every pair.
        let Presentation::FiniteDim { action, .. } = &ten.module.presentation else {
            panic!("tensor module is finite-dimensional");
        };
        assert_eq!(action[0], Mat::identity(4));
        assert_eq!(
            ten.differential.as_ref().unwrap().columns[0],
            MElt::Fin(vec![rat(0), rat(1), rat(1), rat(0)])
        );
        assert_suite_passes(ten.structure(), SuiteOptions { expect_commutative: true });
    }

    #[test]
    fn one_dimensional_factors_make_a_one_dimensional_tensor() {
        let a = unital_line(&triv());
        let ten = build_tensor(&a, &a).unwrap();
        assert_eq!(ten.module.gens(), 1);
        assert_eq!(
            ten.product_eval(&ten.module.gen_elt(0), &ten.module.gen_elt(0)).unwrap(),
            ten.module.gen_elt(0)
        );
        assert_suite_passes(ten.structure(), SuiteOptions { expect_commutative: true });
    }

    #[test]
    fn exterior_square_is_graded_commutative() {
        let a = exterior();
        let ten = build_tensor(&a, &a).unwrap();
        // (e1(x)e2) * (e2(x)e1) picks up (-1)^{|e2||e2|} from sliding the
        // odd factors past each other.
        let m = &ten.module;
        assert_eq!(
            ten.product_eval(&m.gen_elt(1), &m.gen_elt(2)).unwrap(),
            m.elt_scale(&m.gen_elt(3), &rat(-1))
        );
        assert_eq!(ten.product_eval(&m.gen_elt(2), &m.gen_elt(1)).unwrap(), m.gen_elt(3));
        assert_eq!(ten.product_eval(&m.gen_elt(3), &m.gen_elt(3)).unwrap(), m.zero_elt());
        assert_suite_passes(ten.structure(), SuiteOptions { expect_commutative: true });
    }

    #[test]
    fn action_derivation_factor_fails_the_fourth_condition() {
        let a = truncated_poly_algebra();
        let b = unital_line(&poly1());
        let report = check_tensor_compat(&a, &b).unwrap();
        let rec = find_record(&report, "tensor-compat-4");
        assert_eq!(rec.verdict, Verdict::Fail);
        assert!(
            rec.witnesses.iter().any(|w| w.instance.contains("h=d1")),
            "{:?}",
            rec.witnesses
        );
        let err = build_tensor(&a, &b).unwrap_err();
        assert!(err.to_string().contains("tensor-compat-4"), "{}", err);
    }

    #[test]
    fn tensor_prerequisites_are_enforced() {
        // Mismatched kernels.
        let err = check_tensor_compat(&eps_complex(), &sign_complex()).unwrap_err();
        assert!(matches!(err, Error::KernelMismatch(_)));
        // Nonzero bracket degree.
        let mut s = exterior().into_inner();
        s.grading.as_mut().unwrap().p = 1;
        let shifted = GradedPseudoStructure::new(s).unwrap();
        let err = check_tensor_compat(&shifted, &exterior()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        // Missing product table.
        let mut s = eps_complex().into_inner();
        s.product = None;
        let bare = GradedPseudoStructure::new(s).unwrap();
        let err = check_tensor_compat(&bare, &eps_complex()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn bracket_escape_is_reported_with_a_witness() {
        let kernel = triv();
        let module = Module::finite(&kernel, vec![Mat::identity(2)]).unwrap();
        let mut s = PseudoStructure::new("Esc", module.clone());
        let mut entries = BTreeMap::new();
        // Odd generator in degree 1; {e1*e1} lands on e2 outside span(e1).
        entries.insert((0, 0), unit_tensor(&module, module.gen_elt(1)));
        s.bracket = Some(Bracket::new(entries));
        s.differential = Some(HMap::zero(&module, &module));
        s.grading = Some(Grading { degrees: vec![1, 2], p: 0 });
        let g = GradedPseudoStructure::new(s).unwrap();
        let report = check_subideal(&g, &[g.module.gen_elt(0)], SpanMode::Sub).unwrap();
        let rec = find_record(&report, "sub-bracket-closed");
        assert_eq!(rec.verdict, Verdict::Fail);
        assert!(rec.witnesses[0].detail.contains("escapes"), "{:?}", rec.witnesses);
        // span(e2) absorbs every bracket, so it is even an ideal.
        let report = check_subideal(&g, &[g.module.gen_elt(1)], SpanMode::Ideal).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        // The empty span and the full span always close up.
        assert!(check_subideal(&g, &[], SpanMode::Ideal).unwrap().passed());
        let whole = [g.module.gen_elt(0), g.module.gen_elt(1)];
        assert!(check_subideal(&g, &whole, SpanMode::Ideal).unwrap().passed());
    }

    #[test]
    fn free_group_span_closure_uses_the_finite_picture() {
        let kernel = z2();
        let module = Module::free(&kernel, 2);
        let mut s = PseudoStructure::new("FreeG", module.clone());
        s.differential = Some(HMap { columns: vec![module.gen_elt(1), module.zero_elt()] });
        s.grading = Some(Grading { degrees: vec![0, 1], p: 0 });
        let g = GradedPseudoStructure::new(s).unwrap();
        // d(e1) = e2 escapes the closure of e1, which is spanned by e1, g1 e1.
        let report = check_subideal(&g, &[g.module.gen_elt(0)], SpanMode::Sub).unwrap();
        let rec = find_record(&report, "sub-d-closed");
        assert_eq!(rec.verdict, Verdict::Fail);
        let report = check_subideal(&g, &[g.module.gen_elt(1)], SpanMode::Ideal).unwrap();
        assert!(report.passed(), "{}", report.render_text());
    }

    #[test]
    fn polynomial_free_spans_support_sub_mode_only() {
        let kernel = poly1();
        let module = Module::free(&kernel, 2);
        let mut s = PseudoStructure::new("FreeP", module.clone());
        // d(e1) = d1 e2.
        let dcol = MElt::Free(vec![HopfElement::zero(&kernel), HopfElement::gen(&kernel, 0)]);
        s.differential = Some(HMap { columns: vec![dcol, module.zero_elt()] });
        s.grading = Some(Grading { degrees: vec![0, 1], p: 0 });
        let g = GradedPseudoStructure::new(s).unwrap();
        let report = check_subideal(&g, &[g.module.gen_elt(1)], SpanMode::Sub).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        // The k[d1]-span of d1 e1 misses d(d1 e1) = d1^2 e2.
        let span = [MElt::Free(vec![HopfElement::gen(&kernel, 0), HopfElement::zero(&kernel)])];
        let report = check_subideal(&g, &span, SpanMode::Sub).unwrap();
        let rec = find_record(&report, "sub-d-closed");
        assert_eq!(rec.verdict, Verdict::Fail);
        assert!(matches!(
            check_subideal(&g, &span, SpanMode::Ideal),
            Err(Error::Unsupported(_))
        ));
        // More than one polynomial variable has no span machinery here.
        let wide = Kernel::Polynomial { vars: 2 };
        let wmod = Module::free(&wide, 1);
        let mut s = PseudoStructure::new("Wide", wmod.clone());
        s.differential = Some(HMap::zero(&wmod, &wmod));
        s.grading = Some(Grading { degrees: vec![0], p: 0 });
        let w = GradedPseudoStructure::new(s).unwrap();
        assert!(matches!(
            check_subideal(&w, &[w.module.gen_elt(0)], SpanMode::Sub),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn inhomogeneous_spans_are_refused() {
        let g = eps_complex();
        let span = [MElt::Fin(vec![rat(1), rat(1)])];
        assert!(matches!(
            check_subideal(&g, &span, SpanMode::Sub),
            Err(Error::InvalidGrading(_))
        ));
    }

    #[test]
    fn quotient_of_the_d_line_has_zero_differential() {
        let s = eps_complex();
        let q = build_quotient(&s, &[s.module.gen_elt(1)]).unwrap();
        assert_eq!(q.structure.module.gens(), 1);
        assert_eq!(q.structure.grading.as_ref().unwrap().degrees, vec![0]);
        // The image of d lies in the ideal, so the quotient differential is 0.
        assert!(q.structure.module.elt_is_zero(&q.structure.apply_d(&q.structure.module.gen_elt(0))));
        assert!(q.structure.bracket.as_ref().unwrap().entries.is_empty());
        assert_suite_passes(q.structure.structure(), SuiteOptions::default());
        let cand = HomCandidate {
            source: &s,
            target: &q.structure,
            map: q.projection.clone(),
            name: "projection".into(),
        };
        let report = check_homomorphism(&cand).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        let notes = &report.sections.last().unwrap().notes;
        assert!(notes.iter().any(|n| n.contains("epi")), "{:?}", notes);
    }

    #[test]
    fn quotient_by_zero_is_the_identity_and_by_everything_is_zero() {
        let s = eps_complex();
        let q = build_quotient(&s, &[]).unwrap();
        assert_eq!(q.structure.module.gens(), 2);
        assert_eq!(
            q.structure.bracket.as_ref().unwrap().entries,
            s.bracket.as_ref().unwrap().entries
        );
        let cand = HomCandidate {
            source: &s,
            target: &q.structure,
            map: q.projection.clone(),
            name: "identity".into(),
        };
        let report = check_homomorphism(&cand).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        let notes = &report.sections.last().unwrap().notes;
        assert!(notes.iter().any(|n| n.contains("iso")), "{:?}", notes);
        let whole = [s.module.gen_elt(0), s.module.gen_elt(1)];
        let q = build_quotient(&s, &whole).unwrap();
        assert_eq!(q.structure.module.gens(), 0);
        // A span that is not d-closed is not an ideal.
        let err = build_quotient(&s, &[s.module.gen_elt(0)]).unwrap_err();
        assert!(err.to_string().contains("ideal-d-closed"), "{}", err);
    }

    #[test]
    fn cohomology_of_a_zero_differential_is_the_structure_itself() {
        let s = exterior();
        let c = build_cohomology(&s).unwrap();
        assert_eq!(c.structure.module.gens(), 2);
        assert_eq!(c.structure.grading.as_ref().unwrap().degrees, vec![0, 1]);
        let m = &c.structure.module;
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(
                    c.structure.product_eval(&m.gen_elt(i), &m.gen_elt(j)).unwrap(),
                    MElt::Fin(
                        s.module
                            .fin_coords(&s.product_eval(&s.module.gen_elt(i), &s.module.gen_elt(j)).unwrap())
                            .to_vec()
                    )
                );
            }
        }
        assert_suite_passes(c.structure.structure(), SuiteOptions { expect_commutative: true });
    }

    #[test]
    fn exact_complex_has_zero_cohomology() {
        let c = build_cohomology(&eps_complex()).unwrap();
        assert_eq!(c.structure.module.gens(), 0);
        assert!(c.reps.is_empty());
    }

    #[test]
    fn surviving_class_sits_in_the_top_degree() {
        let s = d_line(1);
        let c = build_cohomology(&s).unwrap();
        assert_eq!(c.structure.module.gens(), 1);
        assert_eq!(c.structure.grading.as_ref().unwrap().degrees, vec![2]);
        assert_eq!(c.reps, vec![s.module.gen_elt(2)]);
        assert_eq!(
            c.class_coords(s.structure(), &s.module.gen_elt(2)).unwrap(),
            MElt::Fin(vec![rat(1)])
        );
        // e2 is a boundary, so its class vanishes; e1 is not a cocycle.
        assert_eq!(
            c.class_coords(s.structure(), &s.module.gen_elt(1)).unwrap(),
            MElt::Fin(vec![rat(0)])
        );
        assert!(matches!(
            c.class_coords(s.structure(), &s.module.gen_elt(0)),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn induced_bracket_survives_on_classes() {
        let s = heisenberg();
        let c = build_cohomology(&s).unwrap();
        assert_eq!(c.structure.module.gens(), 3);
        let expected = unit_tensor(&c.structure.module, c.structure.module.gen_elt(2));
        assert_eq!(c.structure.bracket.as_ref().unwrap().entries[&(0, 1)], expected);
        assert_suite_passes(c.structure.structure(), SuiteOptions::default());
    }

    #[test]
    fn polynomial_cohomology_detects_torsion() {
        let kernel = poly1();
        let module = Module::free(&kernel, 2);
        let mut s = PseudoStructure::new("Tor", module.clone());
        let dcol = MElt::Free(vec![HopfElement::zero(&kernel), HopfElement::gen(&kernel, 0)]);
        s.differential = Some(HMap { columns: vec![dcol, module.zero_elt()] });
        s.grading = Some(Grading { degrees: vec![0, 1], p: 0 });
        let g = GradedPseudoStructure::new(s).unwrap();
        let err = build_cohomology(&g).unwrap_err();
        assert!(err.to_string().contains("torsion"), "{}", err);
    }

    #[test]
    fn polynomial_cohomology_handles_unit_boundaries_and_free_survivors() {
        let kernel = poly1();
        let module = Module::free(&kernel, 3);
        let mut s = PseudoStructure::new("FreeH", module.clone());
        // d(e1) = e2; e3 survives in its own degree.
        s.differential = Some(HMap {
            columns: vec![module.gen_elt(1), module.zero_elt(), module.zero_elt()],
        });
        s.grading = Some(Grading { degrees: vec![0, 1, 5], p: 0 });
        let g = GradedPseudoStructure::new(s).unwrap();
        let c = build_cohomology(&g).unwrap();
        assert_eq!(c.structure.module.gens(), 1);
        assert_eq!(c.structure.grading.as_ref().unwrap().degrees, vec![5]);
        assert_eq!(c.reps, vec![module.gen_elt(2)]);
        // Classes carry polynomial coefficients.
        let x2 = MElt::Free(vec![
            HopfElement::zero(&kernel),
            HopfElement::zero(&kernel),
            HopfElement::from_term(&kernel, kernel.gen_mono(0), rat(3)),
        ]);
        assert_eq!(
            c.class_coords(g.structure(), &x2).unwrap(),
            MElt::Free(vec![HopfElement::from_term(&kernel, kernel.gen_mono(0), rat(3))])
        );
    }

    #[test]
    fn boundary_reach_is_subtracted_through_the_unit_minor() {
        let kernel = poly1();
        let module = Module::free(&kernel, 3);
        let mut s = PseudoStructure::new("Minor", module.clone());
        // d(e1) = e2 + d1 e3 spans a rank-one piece of the degree-1 cocycles.
        let dcol = MElt::Free(vec![
            HopfElement::zero(&kernel),
            HopfElement::unit(&kernel),
            HopfElement::gen(&kernel, 0),
        ]);
        s.differential = Some(HMap {
            columns: vec![dcol, module.zero_elt(), module.zero_elt()],
        });
        s.grading = Some(Grading { degrees: vec![0, 1, 1], p: 0 });
        let g = GradedPseudoStructure::new(s).unwrap();
        let c = build_cohomology(&g).unwrap();
        assert_eq!(c.structure.module.gens(), 1);
        // [e2] = -d1 [e3] because e2 + d1 e3 is a boundary.
        let class = c.class_coords(g.structure(), &module.gen_elt(1)).unwrap();
        assert_eq!(
            class,
            MElt::Free(vec![HopfElement::from_term(&kernel, kernel.gen_mono(0), rat(-1))])
        );
    }

    #[test]
    fn isomorphism_induces_a_cohomology_isomorphism() {
        let s = d_line(1);
        let t = d_line(2);
        let f = diag_map(&s.module, &[1, 2, 3]);
        let report = check_cohomology_invariance(&s, &t, &f).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        let rec = find_record(&report, "induced-bijective");
        assert_eq!(rec.verdict, Verdict::Pass);
    }

    #[test]
    fn sign_flip_on_the_d_image_fails_the_differential_condition() {
        let s = d_line(1);
        let f = diag_map(&s.module, &[1, -1, 1]);
        let report = check_cohomology_invariance(&s, &s, &f).unwrap();
        assert!(!report.passed());
        let rec = find_record(&report, "hom-d");
        assert_eq!(rec.verdict, Verdict::Fail);
        let skipped = report
            .sections
            .iter()
            .find(|sec| sec.name == "induced-map")
            .unwrap();
        assert!(skipped.notes.iter().any(|n| n.contains("skipped")), "{:?}", skipped.notes);
    }

    #[test]
    fn induced_maps_compose() {
        let s = d_line(1);
        let t = d_line(2);
        let u = d_line(4);
        let f = diag_map(&s.module, &[1, 2, 3]);
        let g = diag_map(&t.module, &[1, 2, 5]);
        let cs = build_cohomology(&s).unwrap();
        let ct = build_cohomology(&t).unwrap();
        let cu = build_cohomology(&u).unwrap();
        let ind_f = induced_map(&s, &t, &cs, &ct, &f).unwrap();
        let ind_g = induced_map(&t, &u, &ct, &cu, &g).unwrap();
        let gf = g.compose(&t.module, &u.module, &f);
        let ind_gf = induced_map(&s, &u, &cs, &cu, &gf).unwrap();
        let composed = ind_g.compose(&ct.structure.module, &cu.structure.module, &ind_f);
        assert_eq!(ind_gf.columns, composed.columns);
    }

    #[test]
    fn scaling_the_odd_generator_is_an_algebra_map() {
        let s = exterior();
        let f = diag_map(&s.module, &[1, 2]);
        let cand = HomCandidate { source: &s, target: &s, map: f, name: "scale".into() };
        let report = check_homomorphism(&cand).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        let notes = &report.sections.last().unwrap().notes;
        assert!(notes.iter().any(|n| n.contains("iso")), "{:?}", notes);
    }

    #[test]
    fn scaling_the_unit_breaks_the_product_condition() {
        let s = exterior();
        let f = diag_map(&s.module, &[2, 1]);
        let cand = HomCandidate { source: &s, target: &s, map: f, name: "bad".into() };
        let report = check_homomorphism(&cand).unwrap();
        let rec = find_record(&report, "hom-product");
        assert_eq!(rec.verdict, Verdict::Fail);
        assert!(rec.witnesses[0].instance.contains("e1*e1"), "{:?}", rec.witnesses);
    }

    #[test]
    fn the_bracket_condition_pushes_module_parts() {
        let s = heisenberg();
        // f(e3) must equal the product of the scalings of e1 and e2.
        let good = diag_map(&s.module, &[2, 3, 6]);
        let cand = HomCandidate { source: &s, target: &s, map: good, name: "good".into() };
        assert!(check_homomorphism(&cand).unwrap().passed());
        let bad = diag_map(&s.module, &[1, 1, 2]);
        let cand = HomCandidate { source: &s, target: &s, map: bad, name: "bad".into() };
        let report = check_homomorphism(&cand).unwrap();
        let rec = find_record(&report, "hom-bracket");
        assert_eq!(rec.verdict, Verdict::Fail);
    }

    #[test]
    fn classification_covers_the_free_presentations() {
        let kernel = poly1();
        let module = Module::free(&kernel, 1);
        let mut s = PseudoStructure::new("F1", module.clone());
        s.differential = Some(HMap::zero(&module, &module));
        s.grading = Some(Grading { degrees: vec![0], p: 0 });
        let g = GradedPseudoStructure::new(s).unwrap();
        // Multiplication by d1 is injective but misses the constants.
        let f = HMap {
            columns: vec![MElt::Free(vec![HopfElement::gen(&kernel, 0)])],
        };
        let cand = HomCandidate { source: &g, target: &g, map: f, name: "mul".into() };
        let report = check_homomorphism(&cand).unwrap();
        let notes = &report.sections.last().unwrap().notes;
        assert!(notes.iter().any(|n| n.contains("mono, not epi")), "{:?}", notes);
        let ident = HMap::identity(&g.module);
        let cand = HomCandidate { source: &g, target: &g, map: ident, name: "id".into() };
        let report = check_homomorphism(&cand).unwrap();
        let notes = &report.sections.last().unwrap().notes;
        assert!(notes.iter().any(|n| n.contains("iso")), "{:?}", notes);
        // Over a group kernel, 1 + g1 has a kernel and a cokernel.
        let kernel = z2();
        let module = Module::free(&kernel, 1);
        let mut s = PseudoStructure::new("G1", module.clone());
        s.differential = Some(HMap::zero(&module, &module));
        s.grading = Some(Grading { degrees: vec![0], p: 0 });
        let g = GradedPseudoStructure::new(s).unwrap();
        let aug = HopfElement::unit(&kernel).add(&HopfElement::from_mono(&kernel, kernel.gen_mono(0)));
        let f = HMap { columns: vec![MElt::Free(vec![aug])] };
        let cand = HomCandidate { source: &g, target: &g, map: f, name: "aug".into() };
        let report = check_homomorphism(&cand).unwrap();
        let notes = &report.sections.last().unwrap().notes;
        assert!(notes.iter().any(|n| n.contains("neither")), "{:?}", notes);
    }

    #[test]
    fn cohomology_of_a_tensor_square_vanishes_with_its_factors() {
        let a = eps_complex();
        let ten = build_tensor(&a, &a).unwrap();
        let c = build_cohomology(&ten).unwrap();
        assert_eq!(c.structure.module.gens(), 0);
    }
}
