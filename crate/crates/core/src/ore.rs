//! Skew polynomial extensions of commutative Poisson structures.
//!
//! Given a commutative Poisson structure on A and two module endomorphisms
//! alpha and delta, the extension lives on A[x] truncated at a chosen
//! x-degree, with product (a x^i)(b x^j) = (a.b) x^{i+j} and bracket
//!
//! ```text
//! {a x^i * b x^j} = ({a*b} + (1(x)1)(x)_H (j b.alpha(a) - i a.alpha(b))) x^{i+j}
//!                 + (1(x)1)(x)_H (j b.delta(a) - i a.delta(b)) x^{i+j-1}
//! ```
//!
//! The kernel acts on the A factor only: h.(a x^n) = (h a) x^n. The extension
//! is Poisson exactly when alpha satisfies the derivation laws for both the
//! product and the bracket, and delta satisfies them up to the correction
//! terms delta(a).alpha(b) - alpha(a).delta(b).

use num_traits::Zero;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::module::{Grading, HMap, MElt, Module, Presentation};
use crate::polytensor::PolyTensor;
use crate::report::{LawRecord, LawRun, Report};
use crate::scalar::{rat, Rat};
use crate::structure::{run_suite, Bracket, Product, ProductStyle, PseudoStructure, SuiteOptions};

/// A commutative Poisson base together with the two extension maps.
#[derive(Debug, Clone)]
pub struct OreData {
    pub base: PseudoStructure,
    pub alpha: HMap,
    pub delta: HMap,
}

/// A polynomial over the base module, kept sorted by exponent with no zero
/// coefficients.
#[derive(Debug, Clone)]
pub struct OrePolynomial {
    terms: Vec<(MElt, u64)>,
}

impl OrePolynomial {
    pub fn new(base: &Module, terms: Vec<(MElt, u64)>) -> Self {
        let mut by_exp: BTreeMap<u64, MElt> = BTreeMap::new();
        for (c, e) in terms {
            match by_exp.remove(&e) {
                Some(prev) => {
                    by_exp.insert(e, base.elt_add(&prev, &c));
                }
                None => {
                    by_exp.insert(e, c);
                }
            }
        }
        by_exp.retain(|_, c| !base.elt_is_zero(c));
        OrePolynomial { terms: by_exp.into_iter().map(|(e, c)| (c, e)).collect() }
    }

    pub fn terms(&self) -> &[(MElt, u64)] {
        &self.terms
    }

    /// The corresponding element of the truncated extension module.
    pub fn to_extended(&self, base: &Module, bound: u64) -> Result<MElt> {
        let ext = extension_module(base, bound)?;
        let mut out = ext.zero_elt();
        for (c, e) in &self.terms {
            if *e > bound {
                return Err(Error::OutOfRange(format!(
                    "x-exponent {e} exceeds the truncation bound {bound}"
                )));
            }
            out = ext.elt_add(&out, &embed_elt(base, &ext, c, *e));
        }
        Ok(out)
    }
}

/// The module A (x) k[x]_{<= bound}; generator (a, i) sits at index i*r + a.
pub fn extension_module(base: &Module, bound: u64) -> Result<Module> {
    let copies = (bound + 1) as usize;
    match &base.presentation {
        Presentation::Free { rank } => Ok(Module::free(&base.kernel, rank * copies)),
        Presentation::FiniteDim { dim, action } => {
            let acts = action
                .iter()
                .map(|a| crate::linalg::Mat::identity(copies).kronecker(a))
                .collect();
            let _ = dim;
            Module::finite(&base.kernel, acts)
        }
    }
}

/// Places a base element at x-degree `deg` inside the extension module.
pub fn embed_elt(base: &Module, ext: &Module, m: &MElt, deg: u64) -> MElt {
    let r = base.gens();
    let off = deg as usize * r;
    let mut out = ext.zero_elt();
    match (m, &mut out) {
        (MElt::Free(src), MElt::Free(dst)) => {
            for (i, f) in src.iter().enumerate() {
                dst[off + i] = f.clone();
            }
        }
        (MElt::Fin(src), MElt::Fin(dst)) => {
            for (i, c) in src.iter().enumerate() {
                dst[off + i] = c.clone();
            }
        }
        _ => panic!("presentation mismatch between base and extension"),
    }
    out
}

/// Places a base tensor at x-degree `deg`: tuples unchanged, module parts
/// embedded.
fn embed_tensor(base: &Module, ext: &Module, t: &PolyTensor, deg: u64) -> PolyTensor {
    let mut out = PolyTensor::zero(t.slots);
    for (tuple, m) in t.terms() {
        out.add_term(ext, tuple.clone(), embed_elt(base, ext, m, deg));
    }
    out
}

/// Applies a module endomorphism to every module part of a tensor.
pub fn map_tensor(module: &Module, map: &HMap, t: &PolyTensor) -> PolyTensor {
    let mut out = PolyTensor::zero(t.slots);
    for (tuple, m) in t.terms() {
        out.add_term(module, tuple.clone(), map.apply(module, module, m));
    }
    out.straighten(module)
}

fn unit_pair_tensor(module: &Module, m: &MElt) -> PolyTensor {
    let mut t = PolyTensor::zero(2);
    t.add_term(module, vec![module.kernel.unit_mono(); 2], m.clone());
    t
}

/// Derivation law records for a candidate map, against the base structure.
///
/// `correction_with`: when checking delta, the already-validated alpha whose
/// correction terms enter the bracket law; `None` checks the plain laws.
fn derivation_laws(
    s: &PseudoStructure,
    map: &HMap,
    map_name: &str,
    correction_with: Option<&HMap>,
) -> Result<Vec<LawRecord>> {
    let module = &s.module;
    let n = module.gens();
    let mut records = Vec::new();
    let prefix = if correction_with.is_some() { "alpha-derivation" } else { "derivation" };
    let subject = format!("{}:{}", s.name, map_name);

    {
        let mut run = LawRun::new(&format!("{prefix}-h-linear"), &subject);
        let outcome = match map.validate(module, module) {
            Ok(()) => Ok(None),
            Err(e) => Ok(Some(e.to_string())),
        };
        run.instance(|| "(definition)".to_string(), outcome)?;
        records.push(run.finish());
    }

    // (i) map(a.b) = map(a).b + a.map(b) on generator pairs.
    let mut run = LawRun::new(&format!("{prefix}-product-rule"), &subject);
    for i in 0..n {
        for j in 0..n {
            let name = || format!("(e{}, e{})", i + 1, j + 1);
            let outcome = (|| {
                let ab = s.product_eval(&module.gen_elt(i), &module.gen_elt(j))?;
                let lhs = map.apply(module, module, &ab);
                let ma = map.apply(module, module, &module.gen_elt(i));
                let mb = map.apply(module, module, &module.gen_elt(j));
                let rhs = module.elt_add(
                    &s.product_eval(&ma, &module.gen_elt(j))?,
                    &s.product_eval(&module.gen_elt(i), &mb)?,
                );
                let diff = module.elt_sub(&lhs, &rhs);
                Ok((!module.elt_is_zero(&diff)).then(|| module.fmt_elt(&diff)))
            })();
            run.instance(name, outcome)?;
        }
    }
    records.push(run.finish());

    // (ii) map applied inside the bracket, with alpha corrections for delta:
    // (id(x)id(x)_H map){a*b} = {map(a)*b} + {a*map(b)}
    //                           [+ (1(x)1)(x)_H (map(a).alpha(b) - alpha(a).map(b))].
    let mut run = LawRun::new(&format!("{prefix}-bracket-rule"), &subject);
    for i in 0..n {
        for j in 0..n {
            let name = || format!("(e{}, e{})", i + 1, j + 1);
            let outcome = (|| {
                let ab = s.bracket_eval(&module.gen_elt(i), &module.gen_elt(j))?;
                let lhs = map_tensor(module, map, &ab);
                let ma = map.apply(module, module, &module.gen_elt(i));
                let mb = map.apply(module, module, &module.gen_elt(j));
                let mut rhs = s
                    .bracket_eval(&ma, &module.gen_elt(j))?
                    .add(module, &s.bracket_eval(&module.gen_elt(i), &mb)?);
                if let Some(alpha) = correction_with {
                    let aa = alpha.apply(module, module, &module.gen_elt(i));
                    let ab2 = alpha.apply(module, module, &module.gen_elt(j));
                    let plus = s.product_eval(&ma, &ab2)?;
                    let minus = s.product_eval(&aa, &mb)?;
                    rhs = rhs
                        .add(module, &unit_pair_tensor(module, &plus))
                        .sub(module, &unit_pair_tensor(module, &minus));
                }
                let diff = lhs.sub(module, &rhs.straighten(module));
                Ok((!diff.is_zero()).then(|| diff.fmt(module)))
            })();
            run.instance(name, outcome)?;
        }
    }
    records.push(run.finish());

    Ok(records)
}

/// Records the interpretation choices every extension result depends on.
pub fn record_ore_conventions(report: &mut Report) {
    report.convention(
        "x-action",
        "the kernel acts on the coefficient only: h.(a x^n) = (h a) x^n",
    );
    report.convention(
        "x-truncation",
        "the extension is modeled up to a fixed x-degree; pairs landing beyond \
         it are skipped, not truncated",
    );
}

/// Checks that `alpha` is a derivation for both the product and the bracket.
pub fn check_pseudoderivation(base: &PseudoStructure, alpha: &HMap) -> Result<Report> {
    let mut report = Report::new("check-derivation");
    let section = report.section("derivation");
    section.records = derivation_laws(base, alpha, "alpha", None)?;
    Ok(report)
}

/// Checks the twisted derivation laws for `delta` relative to `alpha`.
pub fn check_alpha_pseudoderivation(
    base: &PseudoStructure,
    alpha: &HMap,
    delta: &HMap,
) -> Result<Report> {
    let mut report = Report::new("check-alpha-derivation");
    let section = report.section("alpha-derivation");
    section.records = derivation_laws(base, delta, "delta", Some(alpha))?;
    Ok(report)
}

/// All derivation law records for a data set: alpha's, then delta's.
pub fn derivation_records(data: &OreData) -> Result<Vec<LawRecord>> {
    let mut records = derivation_laws(&data.base, &data.alpha, "alpha", None)?;
    records.extend(derivation_laws(&data.base, &data.delta, "delta", Some(&data.alpha))?);
    Ok(records)
}

/// Builds the truncated extension without validating the maps first.
pub fn build_ore_extension_unchecked(data: &OreData, bound: u64) -> Result<PseudoStructure> {
    let base = &data.base;
    let bm = &base.module;
    let r = bm.gens();
    let copies = (bound + 1) as usize;
    let ext = extension_module(bm, bound)?;
    let n = ext.gens();

    let base_product = base
        .product
        .as_ref()
        .ok_or_else(|| Error::InvalidTable("extension needs a base product".into()))?;
    let base_bracket = base
        .bracket
        .as_ref()
        .ok_or_else(|| Error::InvalidTable("extension needs a base bracket".into()))?;

    // Product: (a x^i)(b x^j) = (a.b) x^{i+j}, refused past the bound.
    let mut out_of_range = BTreeSet::new();
    for i in 0..copies {
        for j in 0..copies {
            if i + j >= copies {
                for a in 0..r {
                    for b in 0..r {
                        out_of_range.insert((i * r + a, j * r + b));
                    }
                }
            }
        }
    }
    let product = match &base_product.style {
        ProductStyle::FirstSlot { sc } => {
            let mut ext_sc = vec![vec![vec![Rat::zero(); n]; n]; n];
            for i in 0..copies {
                for j in 0..copies {
                    if i + j >= copies {
                        continue;
                    }
                    for a in 0..r {
                        for b in 0..r {
                            for c in 0..r {
                                if !sc[a][b][c].is_zero() {
                                    ext_sc[i * r + a][j * r + b][(i + j) * r + c] =
                                        sc[a][b][c].clone();
                                }
                            }
                        }
                    }
                }
            }
            Product { style: ProductStyle::FirstSlot { sc: ext_sc }, out_of_range: out_of_range.clone() }
        }
        ProductStyle::Table { table } => {
            let mut ext_table = vec![vec![ext.zero_elt(); n]; n];
            for i in 0..copies {
                for j in 0..copies {
                    if i + j >= copies {
                        continue;
                    }
                    for a in 0..r {
                        for b in 0..r {
                            ext_table[i * r + a][j * r + b] =
                                embed_elt(bm, &ext, &table[a][b], (i + j) as u64);
                        }
                    }
                }
            }
            Product { style: ProductStyle::Table { table: ext_table }, out_of_range: out_of_range.clone() }
        }
    };

    // Bracket entries from the displayed formula.
    let mut entries = BTreeMap::new();
    for i in 0..copies {
        for j in 0..copies {
            if i + j >= copies {
                continue;
            }
            for a in 0..r {
                for b in 0..r {
                    let ea = bm.gen_elt(a);
                    let eb = bm.gen_elt(b);
                    let mut top = base_bracket.entry(bm, a, b)?;
                    let alpha_a = data.alpha.apply(bm, bm, &ea);
                    let alpha_b = data.alpha.apply(bm, bm, &eb);
                    let twist = bm.elt_sub(
                        &bm.elt_scale(&base.product_eval(&eb, &alpha_a)?, &rat(j as i64)),
                        &bm.elt_scale(&base.product_eval(&ea, &alpha_b)?, &rat(i as i64)),
                    );
                    top = top.add(bm, &unit_pair_tensor(bm, &twist));
                    let mut entry = embed_tensor(bm, &ext, &top, (i + j) as u64);
                    if i + j >= 1 {
                        let delta_a = data.delta.apply(bm, bm, &ea);
                        let delta_b = data.delta.apply(bm, bm, &eb);
                        let low = bm.elt_sub(
                            &bm.elt_scale(&base.product_eval(&eb, &delta_a)?, &rat(j as i64)),
                            &bm.elt_scale(&base.product_eval(&ea, &delta_b)?, &rat(i as i64)),
                        );
                        let low_t = unit_pair_tensor(bm, &low);
                        entry = entry.add(&ext, &embed_tensor(bm, &ext, &low_t, (i + j - 1) as u64));
                    }
                    if !entry.is_zero() {
                        entries.insert((i * r + a, j * r + b), entry);
                    }
                }
            }
        }
    }
    let bracket = Bracket { entries, out_of_range };

    let grading = base.grading.as_ref().map(|g| {
        let mut degrees = Vec::with_capacity(n);
        for _ in 0..copies {
            degrees.extend_from_slice(&g.degrees);
        }
        Grading { degrees, p: g.p }
    });

    let mut s = PseudoStructure::new(&format!("{}[x]", base.name), ext);
    s.product = Some(product);
    s.bracket = Some(bracket);
    s.grading = grading;
    Ok(s)
}

/// Builds the extension, refusing when the derivation checks fail.
pub fn build_ore_extension(data: &OreData, bound: u64) -> Result<PseudoStructure> {
    let records = derivation_records(data)?;
    let failing: Vec<&str> = records
        .iter()
        .filter(|x| !x.passed())
        .map(|x| x.law.as_str())
        .collect();
    if !failing.is_empty() {
        return Err(Error::InvalidMap(format!(
            "extension maps fail the derivation laws: {}",
            failing.join(", ")
        )));
    }
    build_ore_extension_unchecked(data, bound)
}

/// Both directions of the extension theorem: the derivation checks, the full
/// suite on the built extension, and the equivalence of the two verdicts.
pub fn verify_ore_theorem(data: &OreData, bound: u64) -> Result<Report> {
    let mut report = Report::new("verify-ore");
    record_ore_conventions(&mut report);

    let checks = derivation_records(data)?;
    let checks_pass = checks.iter().all(LawRecord::passed);
    report.section("derivation-checks").records = checks;

    let ext = build_ore_extension_unchecked(data, bound)?;
    let suite = run_suite(&ext, SuiteOptions { expect_commutative: true })?;
    let suite_pass = suite.iter().all(LawRecord::passed);
    report.section("extension-suite").records = suite;

    let mut run = LawRun::new("extension-equivalence", &data.base.name);
    let verdict_word = |ok: bool| if ok { "pass" } else { "fail" };
    let outcome = if checks_pass == suite_pass {
        Ok(None)
    } else {
        Ok(Some(format!(
            "derivation checks {} but the extension suite {}",
            verdict_word(checks_pass),
            verdict_word(suite_pass)
        )))
    };
    run.instance(|| format!("(x-degree bound {bound})"), outcome)?;
    report.section("equivalence").records.push(run.finish());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{HopfElement, Kernel};
    use crate::report::Verdict;

    fn poly1() -> Kernel {
        Kernel::Polynomial { vars: 1 }
    }

    fn z2() -> Kernel {
        Kernel::Group { orders: vec![2] }
    }

    /// Base k[t]/t^2 as a rank-2 free structure: e1 = 1, e2 = t, zero bracket.
    fn dual_numbers(kernel: &Kernel) -> PseudoStructure {
        let module = Module::free(kernel, 2);
        let mut sc = vec![vec![vec![rat(0); 2]; 2]; 2];
        sc[0][0][0] = rat(1);
        sc[0][1][1] = rat(1);
        sc[1][0][1] = rat(1);
        let mut s = PseudoStructure::new("Dual", module);
        s.product = Some(Product::first_slot(sc));
        s.bracket = Some(Bracket::new(BTreeMap::new()));
        s
    }

    /// t d/dt scaled: e1 -> 0, e2 -> lambda e2.
    fn euler_map(module: &Module, lambda: i64) -> HMap {
        HMap {
            columns: vec![module.zero_elt(), module.elt_scale(&module.gen_elt(1), &rat(lambda))],
        }
    }

    /// Base span{1, u, v} with {u, v} = u, square-zero products.
    fn uv_base(kernel: &Kernel) -> PseudoStructure {
        let module = Module::free(kernel, 3);
        let mut sc = vec![vec![vec![rat(0); 3]; 3]; 3];
        for i in 0..3 {
            sc[0][i][i] = rat(1);
            sc[i][0][i] = rat(1);
        }
        let mut t = PolyTensor::zero(2);
        t.add_term(&module, vec![kernel.unit_mono(); 2], module.gen_elt(1));
        let mut entries = BTreeMap::new();
        entries.insert((1, 2), t.clone());
        entries.insert((2, 1), t.scale(&module, &rat(-1)));
        let mut s = PseudoStructure::new("UV", module);
        s.product = Some(Product::first_slot(sc));
        s.bracket = Some(Bracket::new(entries));
        s
    }

    fn columns(images: Vec<MElt>) -> HMap {
        HMap { columns: images }
    }

    fn uv_alpha(module: &Module) -> HMap {
        columns(vec![module.zero_elt(), module.gen_elt(1), module.zero_elt()])
    }

    fn uv_delta(module: &Module) -> HMap {
        columns(vec![
                module.zero_elt(),
                module.elt_scale(&module.gen_elt(1), &rat(2)),
                module.elt_scale(&module.gen_elt(1), &rat(3)),
            ],
        )
    }

    /// Base k[y,z]/(y^2, z^2): e1 = 1, e2 = y, e3 = z, e4 = yz; zero bracket.
    fn yz_base(kernel: &Kernel) -> PseudoStructure {
        let module = Module::free(kernel, 4);
        let mut sc = vec![vec![vec![rat(0); 4]; 4]; 4];
        for i in 0..4 {
            sc[0][i][i] = rat(1);
            if i > 0 {
                sc[i][0][i] = rat(1);
            }
        }
        sc[1][2][3] = rat(1);
        sc[2][1][3] = rat(1);
        let mut s = PseudoStructure::new("YZ", module);
        s.product = Some(Product::first_slot(sc));
        s.bracket = Some(Bracket::new(BTreeMap::new()));
        s
    }

    /// y d/dy scaled: y -> lambda y, yz -> lambda yz.
    fn yz_euler(module: &Module, lambda: i64) -> HMap {
        columns(vec![
                module.zero_elt(),
                module.elt_scale(&module.gen_elt(1), &rat(lambda)),
                module.zero_elt(),
                module.elt_scale(&module.gen_elt(3), &rat(lambda)),
            ],
        )
    }

    fn valid_seeds() -> Vec<OreData> {
        let mut out = Vec::new();
        for kernel in [poly1(), z2()] {
            let base = dual_numbers(&kernel);
            let alpha = euler_map(&base.module, 1);
            let delta = euler_map(&base.module, 2);
            out.push(OreData { base, alpha, delta });

            let base = uv_base(&kernel);
            let alpha = uv_alpha(&base.module);
            let delta = uv_delta(&base.module);
            out.push(OreData { base, alpha, delta });

            let base = yz_base(&kernel);
            let alpha = yz_euler(&base.module, 1);
            let delta = yz_euler(&base.module, 2);
            out.push(OreData { base, alpha, delta });
        }
        out
    }

    fn corrupted_seeds() -> Vec<(OreData, &'static str)> {
        let mut out = Vec::new();

        // Identity is not a product derivation on a unital algebra.
        let base = dual_numbers(&poly1());
        let alpha = HMap::identity(&base.module);
        let delta = HMap::zero(&base.module, &base.module);
        out.push((OreData { base, alpha, delta }, "derivation-product-rule"));

        // v -> v respects products but not the bracket {u, v} = u.
        let base = uv_base(&poly1());
        let alpha =
            columns(vec![base.module.zero_elt(), base.module.zero_elt(), base.module.gen_elt(2)]);
        let delta = HMap::zero(&base.module, &base.module);
        out.push((OreData { base, alpha, delta }, "derivation-bracket-rule"));

        // Identity as delta fails its product rule the same way.
        let base = dual_numbers(&poly1());
        let alpha = euler_map(&base.module, 1);
        let delta = HMap::identity(&base.module);
        out.push((OreData { base, alpha, delta }, "alpha-derivation-product-rule"));

        // z -> z is a derivation, but its correction term against alpha =
        // y d/dy is delta(y).alpha(z) - alpha(y).delta(z) = -yz, nonzero.
        let base = yz_base(&poly1());
        let alpha = yz_euler(&base.module, 1);
        let delta = columns(vec![
                base.module.zero_elt(),
                base.module.zero_elt(),
                base.module.gen_elt(2),
                base.module.gen_elt(3),
            ],
        );
        out.push((OreData { base, alpha, delta }, "alpha-derivation-bracket-rule"));

        // Group kernel: u -> g.u keeps the coefficient on the module side,
        // while the bracket law wants it in a tensor slot.
        let base = uv_base(&z2());
        let g = HopfElement::gen(&base.module.kernel, 0);
        let gu = base.module.act(&g, &base.module.gen_elt(1));
        let alpha = columns(vec![base.module.zero_elt(), gu, base.module.zero_elt()]);
        let delta = HMap::zero(&base.module, &base.module);
        out.push((OreData { base, alpha, delta }, "derivation-bracket-rule"));

        out
    }

    fn failing_laws(records: &[LawRecord]) -> Vec<String> {
        records.iter().filter(|x| !x.passed()).map(|x| x.law.clone()).collect()
    }

    #[test]
    fn valid_seeds_pass_derivation_checks() {
        for data in valid_seeds() {
            let records = derivation_records(&data).unwrap();
            assert!(
                failing_laws(&records).is_empty(),
                "{}: {:?}",
                data.base.name,
                failing_laws(&records)
            );
        }
    }

    #[test]
    fn corrupted_seeds_fail_the_expected_law() {
        for (data, law) in corrupted_seeds() {
            let records = derivation_records(&data).unwrap();
            let failing = failing_laws(&records);
            assert!(failing.iter().any(|l| l == law), "expected {law}, got {failing:?}");
        }
    }

    #[test]
    fn theorem_equivalence_across_the_corpus() {
        for data in valid_seeds() {
            let report = verify_ore_theorem(&data, 2).unwrap();
            assert!(report.passed(), "{}:\n{}", data.base.name, report.render_text());
        }
        for (data, _) in corrupted_seeds() {
            let report = verify_ore_theorem(&data, 2).unwrap();
            // Both sides fail, so the equivalence record itself passes.
            let eq = report
                .sections
                .iter()
                .find(|s| s.name == "equivalence")
                .unwrap();
            assert!(eq.records.iter().all(LawRecord::passed), "{}", report.render_text());
            assert!(!report.passed(), "corrupted data produced a clean report");
        }
    }

    #[test]
    fn zero_maps_embed_the_base() {
        let base = uv_base(&poly1());
        let zero = HMap::zero(&base.module, &base.module);
        let data = OreData { base, alpha: zero.clone(), delta: zero };
        let ext = build_ore_extension(&data, 3).unwrap();
        let bb = data.base.bracket.as_ref().unwrap();
        let eb = ext.bracket.as_ref().unwrap();
        let r = data.base.module.gens();
        for a in 0..r {
            for b in 0..r {
                let base_entry = bb.entry(&data.base.module, a, b).unwrap();
                let ext_entry = eb.entry(&ext.module, a, b).unwrap();
                let embedded = embed_tensor(&data.base.module, &ext.module, &base_entry, 0);
                assert!(ext_entry.sub(&ext.module, &embedded).is_zero());
            }
        }
    }

    #[test]
    fn extension_bracket_is_skew_by_construction() {
        for data in valid_seeds().into_iter().take(2) {
            let ext = build_ore_extension(&data, 2).unwrap();
            let br = ext.bracket.as_ref().unwrap();
            let n = ext.module.gens();
            for i in 0..n {
                for j in 0..n {
                    if br.out_of_range.contains(&(i, j)) {
                        continue;
                    }
                    let fwd = br.entry(&ext.module, i, j).unwrap();
                    let rev = br.entry(&ext.module, j, i).unwrap();
                    let swapped = fwd.apply_perm(&ext.module, &[1, 0]);
                    assert!(rev.add(&ext.module, &swapped).is_zero(), "pair ({i}, {j})");
                }
            }
        }
    }

    #[test]
    fn x_bracket_matches_the_display() {
        // {a * x} = (1 (x) 1) (x)_H (alpha(a) x + delta(a)).
        let data = &valid_seeds()[1];
        let base = &data.base;
        let bm = &base.module;
        let ext = build_ore_extension(data, 2).unwrap();
        let br = ext.bracket.as_ref().unwrap();
        let r = bm.gens();
        for a in 0..r {
            let got = br.entry(&ext.module, a, r).unwrap();
            let alpha_a = data.alpha.apply(bm, bm, &bm.gen_elt(a));
            let delta_a = data.delta.apply(bm, bm, &bm.gen_elt(a));
            let want = embed_tensor(bm, &ext.module, &unit_pair_tensor(bm, &alpha_a), 1)
                .add(&ext.module, &embed_tensor(bm, &ext.module, &unit_pair_tensor(bm, &delta_a), 0));
            assert!(got.sub(&ext.module, &want).is_zero(), "generator {a}");
        }
    }

    #[test]
    fn refused_construction_names_the_failing_law() {
        let (data, law) = corrupted_seeds().remove(0);
        let err = build_ore_extension(&data, 2).unwrap_err();
        assert!(err.to_string().contains(law), "{err}");
    }

    #[test]
    fn ore_polynomial_canonicalizes_and_embeds() {
        let base = dual_numbers(&poly1());
        let bm = &base.module;
        let p = OrePolynomial::new(
            bm,
            vec![
                (bm.gen_elt(0), 1),
                (bm.gen_elt(1), 0),
                (bm.elt_scale(&bm.gen_elt(0), &rat(-1)), 1),
            ],
        );
        // The x^1 terms cancel.
        assert_eq!(p.terms().len(), 1);
        let ext = p.to_extended(bm, 3).unwrap();
        let ext_mod = extension_module(bm, 3).unwrap();
        assert!(!ext_mod.elt_is_zero(&ext));
        assert!(
            OrePolynomial::new(bm, vec![(bm.gen_elt(0), 9)]).to_extended(bm, 3).is_err(),
            "exponent past the bound must be rejected"
        );
    }

    #[test]
    fn trivial_check_reports_pass_verdicts() {
        let base = uv_base(&poly1());
        let zero = HMap::zero(&base.module, &base.module);
        let report = check_pseudoderivation(&base, &zero).unwrap();
        assert!(report.passed());
        let report = check_alpha_pseudoderivation(&base, &zero, &zero).unwrap();
        assert!(report.passed());
        for s in &report.sections {
            for rec in &s.records {
                assert_eq!(rec.verdict, Verdict::Pass);
            }
        }
    }
}
