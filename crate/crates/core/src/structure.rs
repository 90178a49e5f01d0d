//! Bracket and product tables, their evaluation, and the law suite.
//!
//! A structure bundles a module with any of: a bilinear product, a
//! tensor-valued bracket given on generator pairs, a differential, and a
//! grading. The suite enumerates every law the available pieces are subject
//! to over module generators and kernel generators; since every law is the
//! H-multilinear extension of its generator instances, those instances are
//! exhaustive for table-defined structures.
//!
//! Products come in two styles. `FirstSlot` is the current-type product on a
//! free module: structure constants act on the generators and kernel
//! coefficients multiply out front; its compatibility with the kernel action
//! is a convention recorded in the report rather than an evaluated law.
//! `Table` is a plain bilinear product on a finite-dimensional module, whose
//! action compatibility is evaluated.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hopf::HopfElement;
use crate::module::{Grading, HMap, MElt, Module};
use crate::polytensor::PolyTensor;
use crate::report::{LawRecord, LawRun, Report};
use crate::scalar::{sign_pow, Rat};

/// Bilinear product data.
#[derive(Debug, Clone)]
pub enum ProductStyle {
    /// Structure constants on the generators of a free module; kernel
    /// coefficients multiply in the first slot of each generator.
    FirstSlot { sc: Vec<Vec<Vec<Rat>>> },
    /// Products of basis vectors of a finite-dimensional module.
    Table { table: Vec<Vec<MElt>> },
}

#[derive(Debug, Clone)]
pub struct Product {
    pub style: ProductStyle,
    /// Generator pairs whose product leaves the modeled range (truncated
    /// extensions); evaluation rejects them instead of truncating silently.
    pub out_of_range: BTreeSet<(usize, usize)>,
}

impl Product {
    pub fn first_slot(sc: Vec<Vec<Vec<Rat>>>) -> Self {
        Product { style: ProductStyle::FirstSlot { sc }, out_of_range: BTreeSet::new() }
    }

    pub fn table(table: Vec<Vec<MElt>>) -> Self {
        Product { style: ProductStyle::Table { table }, out_of_range: BTreeSet::new() }
    }

    /// Whether the slot calculus must normalize module coefficients first.
    pub fn first_slot_style(&self) -> bool {
        matches!(self.style, ProductStyle::FirstSlot { .. })
    }

    pub fn validate(&self, module: &Module) -> Result<()> {
        let n = module.gens();
        match &self.style {
            ProductStyle::FirstSlot { sc } => {
                if !module.is_free() {
                    return Err(Error::InvalidTable(
                        "first-slot products need a free module".into(),
                    ));
                }
                if sc.len() != n || sc.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n))
                {
                    return Err(Error::InvalidTable(format!(
                        "structure constants must be {n}x{n}x{n}"
                    )));
                }
            }
            ProductStyle::Table { table } => {
                if module.is_free() {
                    return Err(Error::InvalidTable(
                        "bilinear product tables need a finite-dimensional module".into(),
                    ));
                }
                if table.len() != n || table.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidTable(format!("product table must be {n}x{n}")));
                }
            }
        }
        Ok(())
    }

    fn check_range(&self, i: usize, j: usize) -> Result<()> {
        if self.out_of_range.contains(&(i, j)) {
            return Err(Error::OutOfRange(format!(
                "product of e{} and e{} leaves the truncated range",
                i + 1,
                j + 1
            )));
        }
        Ok(())
    }

    pub fn eval(&self, module: &Module, a: &MElt, b: &MElt) -> Result<MElt> {
        let mut out = module.zero_elt();
        match (&self.style, a, b) {
            (ProductStyle::FirstSlot { sc }, MElt::Free(x), MElt::Free(y)) => {
                for (i, f) in x.iter().enumerate() {
                    if f.is_zero() {
                        continue;
                    }
                    for (j, g) in y.iter().enumerate() {
                        if g.is_zero() {
                            continue;
                        }
                        self.check_range(i, j)?;
                        let fg = f.mul(g);
                        for (k, c) in sc[i][j].iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            let mut part = module.zero_elt();
                            let MElt::Free(v) = &mut part else { unreachable!() };
                            v[k] = fg.scale(c);
                            out = module.elt_add(&out, &part);
                        }
                    }
                }
            }
            (ProductStyle::Table { table }, MElt::Fin(x), MElt::Fin(y)) => {
                for (i, ci) in x.iter().enumerate() {
                    if ci.is_zero() {
                        continue;
                    }
                    for (j, cj) in y.iter().enumerate() {
                        if cj.is_zero() {
                            continue;
                        }
                        self.check_range(i, j)?;
                        out = module.elt_add(&out, &module.elt_scale(&table[i][j], &(ci * cj)));
                    }
                }
            }
            _ => panic!("element kind does not match product style"),
        }
        Ok(out)
    }
}

/// Tensor-valued bracket on generator pairs; missing entries are zero.
#[derive(Debug, Clone)]
pub struct Bracket {
    pub entries: BTreeMap<(usize, usize), PolyTensor>,
    /// Pairs rejected at evaluation time (truncated extensions).
    pub out_of_range: BTreeSet<(usize, usize)>,
}

impl Bracket {
    pub fn new(entries: BTreeMap<(usize, usize), PolyTensor>) -> Self {
        Bracket { entries, out_of_range: BTreeSet::new() }
    }

    pub fn validate(&self, module: &Module) -> Result<()> {
        let n = module.gens();
        for (&(i, j), t) in &self.entries {
            if i >= n || j >= n {
                return Err(Error::InvalidTable(format!(
                    "bracket entry ({}, {}) outside the generator range",
                    i + 1,
                    j + 1
                )));
            }
            if t.slots != 2 {
                return Err(Error::InvalidTable(format!(
                    "bracket entry ({}, {}) has {} slots, expected 2",
                    i + 1,
                    j + 1,
                    t.slots
                )));
            }
        }
        Ok(())
    }

    pub fn entry(&self, module: &Module, i: usize, j: usize) -> Result<PolyTensor> {
        if self.out_of_range.contains(&(i, j)) {
            return Err(Error::OutOfRange(format!(
                "bracket of e{} and e{} leaves the truncated range",
                i + 1,
                j + 1
            )));
        }
        Ok(self
            .entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| PolyTensor::zero(2))
            .straighten(module))
    }

    /// H-bilinear extension: outer coefficients of the arguments multiply the
    /// two slots of the table entries.
    pub fn eval(&self, module: &Module, a: &MElt, b: &MElt) -> Result<PolyTensor> {
        let mut out = PolyTensor::zero(2);
        match (a, b) {
            (MElt::Free(x), MElt::Free(y)) => {
                for (i, f) in x.iter().enumerate() {
                    if f.is_zero() {
                        continue;
                    }
                    for (j, g) in y.iter().enumerate() {
                        if g.is_zero() {
                            continue;
                        }
                        let t = self.entry(module, i, j)?;
                        out = out.add(module, &t.scale_slots(module, &[f.clone(), g.clone()]));
                    }
                }
            }
            (MElt::Fin(x), MElt::Fin(y)) => {
                for (i, ci) in x.iter().enumerate() {
                    if ci.is_zero() {
                        continue;
                    }
                    for (j, cj) in y.iter().enumerate() {
                        if cj.is_zero() {
                            continue;
                        }
                        let t = self.entry(module, i, j)?;
                        out = out.add(module, &t.scale(module, &(ci * cj)));
                    }
                }
            }
            _ => panic!("element kind does not match module presentation"),
        }
        Ok(out.straighten(module))
    }
}

/// A module with any combination of product, bracket, differential, grading.
#[derive(Debug, Clone)]
pub struct PseudoStructure {
    pub name: String,
    pub module: Module,
    pub product: Option<Product>,
    pub bracket: Option<Bracket>,
    pub differential: Option<HMap>,
    pub grading: Option<Grading>,
}

impl PseudoStructure {
    pub fn new(name: &str, module: Module) -> Self {
        PseudoStructure {
            name: name.to_string(),
            module,
            product: None,
            bracket: None,
            differential: None,
            grading: None,
        }
    }

    /// Effective grading: trivial when none was given.
    pub fn grading_or_trivial(&self) -> Grading {
        self.grading
            .clone()
            .unwrap_or_else(|| Grading::trivial(self.module.gens()))
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.grading.as_ref().map_or(0, |g| g.degree(i))
    }

    pub fn shift(&self) -> i64 {
        self.grading.as_ref().map_or(0, |g| g.p)
    }

    pub fn product_eval(&self, a: &MElt, b: &MElt) -> Result<MElt> {
        let p = self
            .product
            .as_ref()
            .ok_or_else(|| Error::InvalidTable("structure has no product".into()))?;
        p.eval(&self.module, a, b)
    }

    pub fn bracket_eval(&self, a: &MElt, b: &MElt) -> Result<PolyTensor> {
        let br = self
            .bracket
            .as_ref()
            .ok_or_else(|| Error::InvalidTable("structure has no bracket".into()))?;
        br.eval(&self.module, a, b)
    }

    pub fn apply_d(&self, x: &MElt) -> MElt {
        match &self.differential {
            Some(d) => d.apply(&self.module, &self.module, x),
            None => self.module.zero_elt(),
        }
    }

    /// Applies the differential to the module parts of a tensor.
    pub fn tensor_apply_d(&self, t: &PolyTensor) -> PolyTensor {
        let mut out = PolyTensor::zero(t.slots);
        for (tuple, m) in t.terms() {
            out.add_term(&self.module, tuple.clone(), self.apply_d(m));
        }
        out.straighten(&self.module)
    }

    fn prod_fn(&self) -> impl Fn(&MElt, &MElt) -> Result<MElt> + '_ {
        move |a, b| self.product_eval(a, b)
    }

    fn normalize_flag(&self) -> bool {
        self.product.as_ref().is_some_and(Product::first_slot_style)
    }

    /// Right multiplication of a bracket value by an element.
    pub fn tensor_mult_right(&self, t: &PolyTensor, b: &MElt) -> Result<PolyTensor> {
        t.slot_mult_right(&self.module, &self.prod_fn(), b, self.normalize_flag())
    }

    /// Left multiplication of a bracket value by an element.
    pub fn tensor_mult_left(&self, t: &PolyTensor, a: &MElt) -> Result<PolyTensor> {
        t.slot_mult_left(&self.module, &self.prod_fn(), a, self.normalize_flag())
    }

    /// Nested bracket: composes the bracket table through two tensors.
    pub fn tensor_compose_bracket(
        &self,
        x: &PolyTensor,
        y: &PolyTensor,
    ) -> Result<PolyTensor> {
        let table = |a: &MElt, b: &MElt| self.bracket_eval(a, b);
        x.compose(&self.module, y, &table)
    }

    pub fn validate(&self) -> Result<()> {
        self.module.validate()?;
        if let Some(p) = &self.product {
            p.validate(&self.module)?;
        }
        if let Some(b) = &self.bracket {
            b.validate(&self.module)?;
        }
        if let Some(d) = &self.differential {
            d.validate(&self.module, &self.module)?;
        }
        if let Some(g) = &self.grading {
            g.validate_action(&self.module)?;
        }
        Ok(())
    }
}

/// Which laws to run; the default derives everything from the structure.
#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    /// Check graded commutativity of the product (Poisson-style structures).
    pub expect_commutative: bool,
}

/// Runs every applicable law and returns one record per law.
pub fn run_suite(s: &PseudoStructure, opts: SuiteOptions) -> Result<Vec<LawRecord>> {
    let mut records = Vec::new();
    let subject = s.name.clone();
    let n = s.module.gens();
    let g = s.grading_or_trivial();
    let p = g.p;
    let module = &s.module;

    // Structural validation first; failures are reported, not propagated.
    {
        let mut run = LawRun::new("structure-valid", &subject);
        let outcome = match s.validate() {
            Ok(()) => Ok(None),
            Err(e) => Ok(Some(e.to_string())),
        };
        run.instance(|| "(definition)".to_string(), outcome)?;
        let rec = run.finish();
        let bad = !rec.passed();
        records.push(rec);
        if bad {
            // Laws on invalid data would panic; stop after reporting.
            return Ok(records);
        }
    }

    let fmt_pt = |t: &PolyTensor| t.fmt(module);

    if let Some(br) = &s.bracket {
        // H-bilinearity is by construction on free modules; on tables it is
        // a real constraint.
        if !module.is_free() {
            let mut run = LawRun::new("h-bilinearity", &subject);
            for gi in 0..module.kernel.gen_count() {
                let h = HopfElement::gen(&module.kernel, gi);
                let unit = HopfElement::unit(&module.kernel);
                for i in 0..n {
                    for j in 0..n {
                        let name = || {
                            format!("({} e{}, e{})", module.kernel.gen_name(gi), i + 1, j + 1)
                        };
                        let outcome = (|| {
                            let ha = module.act(&h, &module.gen_elt(i));
                            let lhs = br.eval(module, &ha, &module.gen_elt(j))?;
                            let rhs = br
                                .entry(module, i, j)?
                                .scale_slots(module, &[h.clone(), unit.clone()]);
                            let diff = lhs.sub(module, &rhs);
                            Ok((!diff.is_zero()).then(|| fmt_pt(&diff)))
                        })();
                        run.instance(name, outcome)?;
                        let name2 = || {
                            format!("(e{}, {} e{})", i + 1, module.kernel.gen_name(gi), j + 1)
                        };
                        let outcome2 = (|| {
                            let hb = module.act(&h, &module.gen_elt(j));
                            let lhs = br.eval(module, &module.gen_elt(i), &hb)?;
                            let rhs = br
                                .entry(module, i, j)?
                                .scale_slots(module, &[unit.clone(), h.clone()]);
                            let diff = lhs.sub(module, &rhs);
                            Ok((!diff.is_zero()).then(|| fmt_pt(&diff)))
                        })();
                        run.instance(name2, outcome2)?;
                    }
                }
            }
            records.push(run.finish());
        }

        // Skew symmetry: {b, a} = -(-1)^{(|a|+p)(|b|+p)} swap{a, b}.
        let mut run = LawRun::new("skew-symmetry", &subject);
        for i in 0..n {
            for j in 0..n {
                let name = || format!("(e{}, e{})", i + 1, j + 1);
                let outcome = (|| {
                    let fwd = br.eval(module, &module.gen_elt(i), &module.gen_elt(j))?;
                    let rev = br.eval(module, &module.gen_elt(j), &module.gen_elt(i))?;
                    let sign = sign_pow((g.degree(i) + p) * (g.degree(j) + p));
                    let swapped = fwd.apply_perm(module, &[1, 0]).scale(module, &sign);
                    let diff = rev.add(module, &swapped);
                    Ok((!diff.is_zero()).then(|| fmt_pt(&diff)))
                })();
                run.instance(name, outcome)?;
            }
        }
        records.push(run.finish());

        // Jacobi: {a,{b,c}} - (-1)^{(|a|+p)(|b|+p)} swap12{b,{a,c}} = {{a,b},c}.
        let mut run = LawRun::new("jacobi", &subject);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let name = || format!("(e{}, e{}, e{})", i + 1, j + 1, k + 1);
                    let outcome = (|| {
                        let a = PolyTensor::embed(module, 1, &module.gen_elt(i));
                        let b = PolyTensor::embed(module, 1, &module.gen_elt(j));
                        let bc = br.eval(module, &module.gen_elt(j), &module.gen_elt(k))?;
                        let ac = br.eval(module, &module.gen_elt(i), &module.gen_elt(k))?;
                        let ab = br.eval(module, &module.gen_elt(i), &module.gen_elt(j))?;
                        let c = PolyTensor::embed(module, 1, &module.gen_elt(k));
                        let lhs = s.tensor_compose_bracket(&a, &bc)?;
                        let mid = s.tensor_compose_bracket(&b, &ac)?;
                        let rhs = ab.compose(module, &c, &{
                            let f = |x: &MElt, y: &MElt| s.bracket_eval(x, y);
                            f
                        })?;
                        let sign = sign_pow((g.degree(i) + p) * (g.degree(j) + p));
                        let mid = mid.apply_perm(module, &[1, 0, 2]).scale(module, &sign);
                        let diff = lhs.sub(module, &mid).sub(module, &rhs);
                        Ok((!diff.is_zero()).then(|| fmt_pt(&diff)))
                    })();
                    run.instance(name, outcome)?;
                }
            }
        }
        records.push(run.finish());

        // Bracket values respect the grading: degree |a| + |b| + p.
        if s.grading.is_some() {
            let mut run = LawRun::new("bracket-degree", &subject);
            for i in 0..n {
                for j in 0..n {
                    let name = || format!("(e{}, e{})", i + 1, j + 1);
                    let outcome = (|| {
                        let t = br.eval(module, &module.gen_elt(i), &module.gen_elt(j))?;
                        let want = g.degree(i) + g.degree(j) + p;
                        for (_, m) in t.terms() {
                            match g.elt_degree(module, m) {
                                Ok(None) => {}
                                Ok(Some(d)) if d == want => {}
                                Ok(Some(d)) => {
                                    return Ok(Some(format!(
                                        "module part has degree {d}, expected {want}"
                                    )))
                                }
                                Err(e) => return Ok(Some(e.to_string())),
                            }
                        }
                        Ok(None)
                    })();
                    run.instance(name, outcome)?;
                }
            }
            records.push(run.finish());
        }
    }

    if let Some(pr) = &s.product {
        // Associativity.
        let mut run = LawRun::new("product-associativity", &subject);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let name = || format!("(e{}, e{}, e{})", i + 1, j + 1, k + 1);
                    let outcome = (|| {
                        let ij = pr.eval(module, &module.gen_elt(i), &module.gen_elt(j))?;
                        let lhs = pr.eval(module, &ij, &module.gen_elt(k))?;
                        let jk = pr.eval(module, &module.gen_elt(j), &module.gen_elt(k))?;
                        let rhs = pr.eval(module, &module.gen_elt(i), &jk)?;
                        let diff = module.elt_sub(&lhs, &rhs);
                        Ok((!module.elt_is_zero(&diff)).then(|| module.fmt_elt(&diff)))
                    })();
                    run.instance(name, outcome)?;
                }
            }
        }
        records.push(run.finish());

        // Graded commutativity, for structures declared commutative.
        if opts.expect_commutative {
            let mut run = LawRun::new("product-commutativity", &subject);
            for i in 0..n {
                for j in 0..n {
                    let name = || format!("(e{}, e{})", i + 1, j + 1);
                    let outcome = (|| {
                        let ab = pr.eval(module, &module.gen_elt(i), &module.gen_elt(j))?;
                        let ba = pr.eval(module, &module.gen_elt(j), &module.gen_elt(i))?;
                        let sign = sign_pow(g.degree(i) * g.degree(j));
                        let diff = module.elt_sub(&ab, &module.elt_scale(&ba, &sign));
                        Ok((!module.elt_is_zero(&diff)).then(|| module.fmt_elt(&diff)))
                    })();
                    run.instance(name, outcome)?;
                }
            }
            records.push(run.finish());
        }

        // Compatibility of the product with the kernel action.
        {
            let mut run = LawRun::new("product-h-differential", &subject);
            if pr.first_slot_style() {
                records.push(run.finish_by_convention());
            } else {
                for gi in 0..module.kernel.gen_count() {
                    let h = HopfElement::gen(&module.kernel, gi);
                    for i in 0..n {
                        for j in 0..n {
                            let name = || {
                                format!(
                                    "({}, e{}, e{})",
                                    module.kernel.gen_name(gi),
                                    i + 1,
                                    j + 1
                                )
                            };
                            let outcome = (|| {
                                let ab =
                                    pr.eval(module, &module.gen_elt(i), &module.gen_elt(j))?;
                                let lhs = module.act(&h, &ab);
                                let mut rhs = module.zero_elt();
                                for (legs, c) in
                                    module.kernel.mono_coproduct_legs(&module.kernel.gen_mono(gi), 2)
                                {
                                    let ha = module.act_mono(&legs[0], &module.gen_elt(i));
                                    let hb = module.act_mono(&legs[1], &module.gen_elt(j));
                                    let term = pr.eval(module, &ha, &hb)?;
                                    rhs = module.elt_add(&rhs, &module.elt_scale(&term, &c));
                                }
                                let diff = module.elt_sub(&lhs, &rhs);
                                Ok((!module.elt_is_zero(&diff)).then(|| module.fmt_elt(&diff)))
                            })();
                            run.instance(name, outcome)?;
                        }
                    }
                }
                records.push(run.finish());
            }
        }

        // Product degrees add.
        if s.grading.is_some() {
            let mut run = LawRun::new("product-degree", &subject);
            for i in 0..n {
                for j in 0..n {
                    let name = || format!("(e{}, e{})", i + 1, j + 1);
                    let outcome = (|| {
                        let ab = pr.eval(module, &module.gen_elt(i), &module.gen_elt(j))?;
                        let want = g.degree(i) + g.degree(j);
                        match g.elt_degree(module, &ab) {
                            Ok(None) => Ok(None),
                            Ok(Some(d)) if d == want => Ok(None),
                            Ok(Some(d)) => {
                                Ok(Some(format!("product has degree {d}, expected {want}")))
                            }
                            Err(e) => Ok(Some(e.to_string())),
                        }
                    })();
                    run.instance(name, outcome)?;
                }
            }
            records.push(run.finish());
        }
    }

    if let (Some(br), Some(_)) = (&s.bracket, &s.product) {
        // Left Leibniz: {a, b.c} = {a,b}.c + (-1)^{(|c|+p)|b|} {a,c}.b.
        let mut run = LawRun::new("leibniz-left", &subject);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let name = || format!("(e{}, e{}, e{})", i + 1, j + 1, k + 1);
                    let outcome = (|| {
                        let bc = s.product_eval(&module.gen_elt(j), &module.gen_elt(k))?;
                        let lhs = br.eval(module, &module.gen_elt(i), &bc)?;
                        let ab = br.eval(module, &module.gen_elt(i), &module.gen_elt(j))?;
                        let ac = br.eval(module, &module.gen_elt(i), &module.gen_elt(k))?;
                        let t1 = s.tensor_mult_right(&ab, &module.gen_elt(k))?;
                        let t2 = s.tensor_mult_right(&ac, &module.gen_elt(j))?;
                        let sign = sign_pow((g.degree(k) + p) * g.degree(j));
                        let rhs = t1.add(module, &t2.scale(module, &sign));
                        let diff = lhs.sub(module, &rhs);
                        Ok((!diff.is_zero()).then(|| fmt_pt(&diff)))
                    })();
                    run.instance(name, outcome)?;
                }
            }
        }
        records.push(run.finish());

        // Right Leibniz: {a.b, c} = a.{b,c} + (-1)^{(|a|+p)|b|} b.{a,c}.
        let mut run = LawRun::new("leibniz-right", &subject);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let name = || format!("(e{}, e{}, e{})", i + 1, j + 1, k + 1);
                    let outcome = (|| {
                        let ab = s.product_eval(&module.gen_elt(i), &module.gen_elt(j))?;
                        let lhs = br.eval(module, &ab, &module.gen_elt(k))?;
                        let bc = br.eval(module, &module.gen_elt(j), &module.gen_elt(k))?;
                        let ac = br.eval(module, &module.gen_elt(i), &module.gen_elt(k))?;
                        let t1 = s.tensor_mult_left(&bc, &module.gen_elt(i))?;
                        let t2 = s.tensor_mult_left(&ac, &module.gen_elt(j))?;
                        let sign = sign_pow((g.degree(i) + p) * g.degree(j));
                        let rhs = t1.add(module, &t2.scale(module, &sign));
                        let diff = lhs.sub(module, &rhs);
                        Ok((!diff.is_zero()).then(|| fmt_pt(&diff)))
                    })();
                    run.instance(name, outcome)?;
                }
            }
        }
        records.push(run.finish());
    }

    if let Some(d) = &s.differential {
        // Degree shift +1.
        if s.grading.is_some() {
            let mut run = LawRun::new("d-degree", &subject);
            let outcome = (|| {
                match d.degree_shift(module, module, &g, &g) {
                    Ok(None) | Ok(Some(1)) => Ok(None),
                    Ok(Some(k)) => Ok(Some(format!("differential shifts degree by {k}"))),
                    Err(e) => Ok(Some(e.to_string())),
                }
            })();
            run.instance(|| "(definition)".to_string(), outcome)?;
            records.push(run.finish());
        }

        // d^2 = 0.
        let mut run = LawRun::new("d-squared", &subject);
        for i in 0..n {
            let name = || format!("(e{})", i + 1);
            let outcome = (|| {
                let dd = s.apply_d(&s.apply_d(&module.gen_elt(i)));
                Ok((!module.elt_is_zero(&dd)).then(|| module.fmt_elt(&dd)))
            })();
            run.instance(name, outcome)?;
        }
        records.push(run.finish());

        // Product rule: d(a.b) = d(a).b + (-1)^{|a|} a.d(b).
        if s.product.is_some() {
            let mut run = LawRun::new("d-product-rule", &subject);
            for i in 0..n {
                for j in 0..n {
                    let name = || format!("(e{}, e{})", i + 1, j + 1);
                    let outcome = (|| {
                        let ab = s.product_eval(&module.gen_elt(i), &module.gen_elt(j))?;
                        let lhs = s.apply_d(&ab);
                        let da = s.apply_d(&module.gen_elt(i));
                        let db = s.apply_d(&module.gen_elt(j));
                        let t1 = s.product_eval(&da, &module.gen_elt(j))?;
                        let t2 = s.product_eval(&module.gen_elt(i), &db)?;
                        let sign = sign_pow(g.degree(i));
                        let rhs = module.elt_add(&t1, &module.elt_scale(&t2, &sign));
                        let diff = module.elt_sub(&lhs, &rhs);
                        Ok((!module.elt_is_zero(&diff)).then(|| module.fmt_elt(&diff)))
                    })();
                    run.instance(name, outcome)?;
                }
            }
            records.push(run.finish());
        }

        // Bracket rule: d{a,b} = {d(a),b} + (-1)^{|a|+p} {a,d(b)}.
        if let Some(br) = &s.bracket {
            let mut run = LawRun::new("d-bracket-rule", &subject);
            for i in 0..n {
                for j in 0..n {
                    let name = || format!("(e{}, e{})", i + 1, j + 1);
                    let outcome = (|| {
                        let ab = br.eval(module, &module.gen_elt(i), &module.gen_elt(j))?;
                        let lhs = s.tensor_apply_d(&ab);
                        let da = s.apply_d(&module.gen_elt(i));
                        let db = s.apply_d(&module.gen_elt(j));
                        let t1 = br.eval(module, &da, &module.gen_elt(j))?;
                        let t2 = br.eval(module, &module.gen_elt(i), &db)?;
                        let sign = sign_pow(g.degree(i) + p);
                        let rhs = t1.add(module, &t2.scale(module, &sign));
                        let diff = lhs.sub(module, &rhs);
                        Ok((!diff.is_zero()).then(|| fmt_pt(&diff)))
                    })();
                    run.instance(name, outcome)?;
                }
            }
            records.push(run.finish());
        }
    }

    Ok(records)
}

/// Rewrites a free structure over a group kernel on its finite k-basis
/// gamma.e_i. The bracket, differential, and grading transport exactly;
/// first-slot products do not (their action compatibility holds only by
/// convention, which the finite-dimensional check would refute), so the
/// result carries no product.
pub fn finitize_structure(s: &PseudoStructure) -> Result<(PseudoStructure, Vec<crate::hopf::Mono>)> {
    let (fin, group) = s.module.finitize()?;
    let g = group.len();
    let rank = s.module.gens();
    let mut out = PseudoStructure::new(&format!("{}-fin", s.name), fin.clone());

    if let Some(br) = &s.bracket {
        let mut entries = BTreeMap::new();
        for i in 0..rank {
            for gi in 0..g {
                for j in 0..rank {
                    for gj in 0..g {
                        if br.out_of_range.contains(&(i, j)) {
                            continue;
                        }
                        let t = br.entry(&s.module, i, j)?.scale_slots(
                            &s.module,
                            &[
                                HopfElement::from_mono(&s.module.kernel, group[gi].clone()),
                                HopfElement::from_mono(&s.module.kernel, group[gj].clone()),
                            ],
                        );
                        let mut ft = PolyTensor::zero(2);
                        for (tuple, m) in t.terms() {
                            ft.add_term(&fin, tuple.clone(), s.module.elt_to_fin(&group, m));
                        }
                        if !ft.is_zero() {
                            entries.insert((i * g + gi, j * g + gj), ft);
                        }
                    }
                }
            }
        }
        out.bracket = Some(Bracket::new(entries));
    }

    if let Some(d) = &s.differential {
        let mut columns = Vec::with_capacity(rank * g);
        for i in 0..rank {
            for gj in 0..g {
                let gamma = HopfElement::from_mono(&s.module.kernel, group[gj].clone());
                let img = s.module.act(&gamma, &d.apply(&s.module, &s.module, &s.module.gen_elt(i)));
                columns.push(s.module.elt_to_fin(&group, &img));
            }
        }
        out.differential = Some(HMap { columns });
    }

    if let Some(gr) = &s.grading {
        let mut degrees = Vec::with_capacity(rank * g);
        for i in 0..rank {
            degrees.extend(std::iter::repeat(gr.degree(i)).take(g));
        }
        out.grading = Some(Grading { degrees, p: gr.p });
    }

    Ok((out, group))
}

/// Convention strings recorded whenever the relevant pieces appear.
pub fn record_conventions(report: &mut Report, s: &PseudoStructure) {
    report.convention(
        "normal-form",
        "tensors are straightened so the last slot is the unit",
    );
    if s.product.as_ref().is_some_and(Product::first_slot_style) {
        report.convention(
            "first-slot-product",
            "kernel elements distribute over first-slot products through the coproduct; \
             the compatibility law is recorded, not evaluated",
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::Kernel;
    use crate::scalar::rat;

    fn poly1() -> Kernel {
        Kernel::Polynomial { vars: 1 }
    }

    /// One-dimensional current algebra: product (f e)(g e) = fg e.
    fn unital_product() -> Product {
        Product::first_slot(vec![vec![vec![rat(1)]]])
    }

    /// The rank-1 bracket {e, e} = 2 (d (x) 1) (x)_H e - (1 (x) 1) (x)_H d e.
    fn witt_structure(with_product: bool) -> PseudoStructure {
        let k = poly1();
        let module = Module::free(&k, 1);
        let d = HopfElement::gen(&k, 0);
        let mut t = PolyTensor::zero(2);
        t.add_term(
            &module,
            vec![vec![1], vec![0]],
            module.elt_scale(&module.gen_elt(0), &rat(2)),
        );
        t.add_term(
            &module,
            vec![vec![0], vec![0]],
            module.elt_scale(&module.act(&d, &module.gen_elt(0)), &rat(-1)),
        );
        let mut entries = BTreeMap::new();
        entries.insert((0, 0), t);
        let mut s = PseudoStructure::new("W", Module::free(&k, 1));
        s.bracket = Some(Bracket::new(entries));
        if with_product {
            s.product = Some(unital_product());
        }
        s
    }

    fn record<'a>(records: &'a [LawRecord], law: &str) -> &'a LawRecord {
        records.iter().find(|r| r.law == law).unwrap_or_else(|| {
            panic!("no record for {law}");
        })
    }

    #[test]
    fn witt_bracket_is_lie_but_not_poisson_with_unital_product() {
        let lie = witt_structure(false);
        let recs = run_suite(&lie, SuiteOptions::default()).unwrap();
        assert!(record(&recs, "skew-symmetry").passed());
        assert!(record(&recs, "jacobi").passed());

        // The Leibniz rule forces {e, e} = 0 against a unital product, so
        // the same bracket cannot be Poisson here.
        let poisson = witt_structure(true);
        let recs = run_suite(&poisson, SuiteOptions { expect_commutative: true }).unwrap();
        assert!(record(&recs, "product-associativity").passed());
        assert!(record(&recs, "product-commutativity").passed());
        assert!(!record(&recs, "leibniz-left").passed());
        assert_eq!(
            record(&recs, "product-h-differential").verdict,
            crate::report::Verdict::ByConvention
        );
    }

    /// Base span{1, u, v} with uu = uv = vv = 0 and {u, v} = u; its current
    /// structure is Poisson.
    fn uv_current(kernel: &Kernel) -> PseudoStructure {
        let module = Module::free(kernel, 3);
        // Generators: e1 = 1, e2 = u, e3 = v.
        let mut sc = vec![vec![vec![rat(0); 3]; 3]; 3];
        for i in 0..3 {
            sc[0][i][i] = rat(1);
            sc[i][0][i] = rat(1);
        }
        let mut entries = BTreeMap::new();
        let mut uvb = PolyTensor::zero(2);
        uvb.add_term(&module, vec![kernel.unit_mono(); 2], module.gen_elt(1));
        entries.insert((1, 2), uvb.clone());
        entries.insert((2, 1), uvb.scale(&module, &rat(-1)));
        let mut s = PseudoStructure::new("CurUV", module);
        s.product = Some(Product::first_slot(sc));
        s.bracket = Some(Bracket::new(entries));
        s
    }

    #[test]
    fn uv_current_passes_full_poisson_suite() {
        for kernel in [poly1(), Kernel::Group { orders: vec![2] }] {
            let s = uv_current(&kernel);
            let recs = run_suite(&s, SuiteOptions { expect_commutative: true }).unwrap();
            for law in [
                "structure-valid",
                "skew-symmetry",
                "jacobi",
                "product-associativity",
                "product-commutativity",
                "leibniz-left",
                "leibniz-right",
            ] {
                assert!(record(&recs, law).passed(), "{law} failed for {kernel:?}");
            }
        }
    }

    #[test]
    fn finite_bracket_h_bilinearity_detects_bad_table() {
        // Trivial Z/2 action with a constant nonzero bracket cannot be
        // H-bilinear: the group coefficient fails to clear.
        let k = Kernel::Group { orders: vec![2] };
        let module = Module::finite(&k, vec![crate::linalg::Mat::identity(2)]).unwrap();
        let mut t = PolyTensor::zero(2);
        t.add_term(&module, vec![k.unit_mono(); 2], module.gen_elt(0));
        let mut entries = BTreeMap::new();
        entries.insert((0, 1), t.clone());
        entries.insert((1, 0), t.scale(&module, &rat(-1)));
        let mut s = PseudoStructure::new("bad", module);
        s.bracket = Some(Bracket::new(entries));
        let recs = run_suite(&s, SuiteOptions::default()).unwrap();
        assert!(!record(&recs, "h-bilinearity").passed());
    }

    #[test]
    fn finitized_bracket_passes_the_finite_checks() {
        let k = Kernel::Group { orders: vec![2] };
        let s = uv_current(&k);
        let (fin, group) = finitize_structure(&s).unwrap();
        assert_eq!(group.len(), 2);
        assert_eq!(fin.module.gens(), 6);
        let recs = run_suite(&fin, SuiteOptions::default()).unwrap();
        for law in ["structure-valid", "h-bilinearity", "skew-symmetry", "jacobi"] {
            assert!(record(&recs, law).passed(), "{law} failed after finitizing");
        }
    }

    #[test]
    fn out_of_range_pairs_are_skipped_and_counted() {
        let mut s = witt_structure(false);
        s.bracket.as_mut().unwrap().out_of_range.insert((0, 0));
        let recs = run_suite(&s, SuiteOptions::default()).unwrap();
        let skew = record(&recs, "skew-symmetry");
        assert_eq!(skew.instances, 0);
        assert_eq!(skew.skipped, 1);
        assert!(skew.passed());
    }
}
