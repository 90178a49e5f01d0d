//! Straightened tensors with outer Hopf coefficients and the slot calculus.
//!
//! A value here represents an element of H^(x)n (x)_H M: a sum of terms, each
//! an n-tuple of kernel monomials together with a module element. The tensor
//! is taken over the diagonal right action of H on H^(x)n, which yields the
//! normal form enforced by [`PolyTensor::straighten`]: every tuple has the
//! unit in its last slot. Concretely, a term whose last slot holds f rewrites
//! by spreading f through the iterated coproduct,
//!
//! ```text
//! f1 (x) ... (x) fn (x)_H m
//!   = sum  f1 S(f_(1)) (x) ... (x) f_{n-1} S(f_(n-1)) (x) 1 (x)_H f_(n) m
//! ```
//!
//! All bracket values and law residues live in this normal form, so equality
//! of straightened tensors is the zero-tolerance test the whole crate rests
//! on.
//!
//! Multiplying a tensor by a module element on either side (the slot
//! calculus) spreads the affected slot through the coproduct and moves one
//! antipode-twisted leg onto the module part. The formula is class-invariant
//! exactly when the module product distributes over the Hopf action; product
//! styles that only satisfy that distribution as a convention (first-slot
//! products on free modules) must first move module coefficients back into
//! the tuple, which [`PolyTensor::module_normalize`] does and the slot
//! operations request through their `normalize` flag.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::hopf::{fmt_mono_tuple, Kernel, Mono};
use crate::module::{MElt, Module};
use crate::scalar::{rat, Rat};

/// Bilinear module product used by the slot calculus.
pub type ProdFn<'a> = &'a dyn Fn(&MElt, &MElt) -> Result<MElt>;

/// Bilinear table producing 2-slot tensors, used by composition.
pub type TableFn<'a> = &'a dyn Fn(&MElt, &MElt) -> Result<PolyTensor>;

/// An element of H^(x)n (x)_H M as a sum of (monomial tuple, module element)
/// terms. Terms with zero module part are pruned on insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTensor {
    pub slots: usize,
    terms: BTreeMap<Vec<Mono>, MElt>,
}

impl PolyTensor {
    pub fn zero(slots: usize) -> Self {
        assert!(slots >= 1, "a tensor needs at least one slot");
        PolyTensor { slots, terms: BTreeMap::new() }
    }

    /// Embeds a module element as a straightened tensor with unit slots.
    pub fn embed(module: &Module, slots: usize, m: &MElt) -> Self {
        let mut out = Self::zero(slots);
        out.add_term(module, vec![module.kernel.unit_mono(); slots], m.clone());
        out
    }

    pub fn from_term(module: &Module, tuple: Vec<Mono>, m: MElt) -> Self {
        let slots = tuple.len();
        let mut out = Self::zero(slots);
        out.add_term(module, tuple, m);
        out
    }

    pub fn add_term(&mut self, module: &Module, tuple: Vec<Mono>, m: MElt) {
        assert_eq!(tuple.len(), self.slots, "tuple length mismatch");
        assert!(
            tuple.iter().all(|t| module.kernel.mono_is_valid(t)),
            "tuple monomial invalid for kernel"
        );
        if module.elt_is_zero(&m) {
            return;
        }
        match self.terms.entry(tuple) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(m);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = module.elt_add(e.get(), &m);
                if module.elt_is_zero(&sum) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Mono>, &MElt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, module: &Module, other: &Self) -> Self {
        assert_eq!(self.slots, other.slots, "slot count mismatch");
        let mut out = self.clone();
        for (t, m) in &other.terms {
            out.add_term(module, t.clone(), m.clone());
        }
        out
    }

    pub fn sub(&self, module: &Module, other: &Self) -> Self {
        self.add(module, &other.scale(module, &rat(-1)))
    }

    pub fn scale(&self, module: &Module, c: &Rat) -> Self {
        let mut out = Self::zero(self.slots);
        for (t, m) in &self.terms {
            out.add_term(module, t.clone(), module.elt_scale(m, c));
        }
        out
    }

    /// Whether every term already has the unit in its last slot.
    pub fn is_straight(&self, kernel: &Kernel) -> bool {
        let unit = kernel.unit_mono();
        self.terms.keys().all(|t| t[self.slots - 1] == unit)
    }

    /// Normal form: clears the last slot of every term in a single pass by
    /// spreading it through the iterated coproduct with antipode twists.
    pub fn straighten(&self, module: &Module) -> Self {
        let kernel = &module.kernel;
        let unit = kernel.unit_mono();
        let n = self.slots;
        let mut out = Self::zero(n);
        for (tuple, m) in &self.terms {
            let last = &tuple[n - 1];
            if last == &unit {
                out.add_term(module, tuple.clone(), m.clone());
                continue;
            }
            for (legs, c) in kernel.mono_coproduct_legs(last, n) {
                let mut coeff = c;
                let mut new_tuple = Vec::with_capacity(n);
                for i in 0..n - 1 {
                    let (sm, sc) = kernel.mono_antipode(&legs[i]);
                    new_tuple.push(kernel.mono_mul(&tuple[i], &sm));
                    coeff *= sc;
                }
                new_tuple.push(unit.clone());
                let part = module.elt_scale(&module.act_mono(&legs[n - 1], m), &coeff);
                out.add_term(module, new_tuple, part);
            }
        }
        out
    }

    /// Inverse direction of straightening for free modules: moves every
    /// module Hopf coefficient into the tuple diagonally, leaving module
    /// parts with scalar coefficients only. Slot multiplication against
    /// first-slot products starts from this representative.
    pub fn module_normalize(&self, module: &Module) -> Self {
        let kernel = &module.kernel;
        let n = self.slots;
        let mut out = Self::zero(n);
        for (tuple, m) in &self.terms {
            let MElt::Free(coeffs) = m else {
                // Finite-dimensional parts carry no Hopf coefficient.
                out.add_term(module, tuple.clone(), m.clone());
                continue;
            };
            for (i, h) in coeffs.iter().enumerate() {
                for (mono, c) in h.terms() {
                    for (legs, lc) in kernel.mono_coproduct_legs(mono, n) {
                        let new_tuple: Vec<Mono> = tuple
                            .iter()
                            .zip(&legs)
                            .map(|(t, l)| kernel.mono_mul(t, l))
                            .collect();
                        let part =
                            module.elt_scale(&module.gen_elt(i), &(c * &lc));
                        out.add_term(module, new_tuple, part);
                    }
                }
            }
        }
        out
    }

    /// Permutes the slots (`perm[i]` = which input slot lands in output slot
    /// i) and re-straightens.
    pub fn apply_perm(&self, module: &Module, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.slots, "permutation length mismatch");
        let mut seen = vec![false; self.slots];
        for &p in perm {
            assert!(p < self.slots && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let mut out = Self::zero(self.slots);
        for (tuple, m) in &self.terms {
            let new_tuple: Vec<Mono> = perm.iter().map(|&p| tuple[p].clone()).collect();
            out.add_term(module, new_tuple, m.clone());
        }
        out.straighten(module)
    }

    /// Multiplies slot i by `coeffs[i]` (outer Hopf coefficients, the
    /// H-bilinear extension operator) and re-straightens.
    pub fn scale_slots(&self, module: &Module, coeffs: &[crate::hopf::HopfElement]) -> Self {
        assert_eq!(coeffs.len(), self.slots, "coefficient count mismatch");
        let kernel = &module.kernel;
        let mut out = Self::zero(self.slots);
        for (tuple, m) in &self.terms {
            // Expand the product of chosen monomials across all slots.
            let mut partial: Vec<(Vec<Mono>, Rat)> = vec![(Vec::new(), rat(1))];
            for (slot, h) in coeffs.iter().enumerate() {
                let mut next = Vec::new();
                for (prefix, c) in &partial {
                    for (mono, hc) in h.terms() {
                        let mut p2 = prefix.clone();
                        p2.push(kernel.mono_mul(&tuple[slot], mono));
                        next.push((p2, c * hc));
                    }
                }
                partial = next;
            }
            for (new_tuple, c) in partial {
                out.add_term(module, new_tuple, module.elt_scale(m, &c));
            }
        }
        out.straighten(module)
    }

    /// Right multiplication by a module element:
    ///
    /// ```text
    /// (f1 (x) ... (x) fn (x)_H a) . b
    ///   = sum (f1 (x) f2 f_(1) (x) ... (x) f_{n-1} f_(n-2) (x) f_(n-1))
    ///         (x)_H a . (S^{-1}(f_(n)) b)
    /// ```
    ///
    /// with f = fn spread through n legs. Needs at least two slots. When
    /// `normalize` is set the tensor is first rewritten so module parts
    /// carry no Hopf coefficients (first-slot product styles).
    pub fn slot_mult_right(
        &self,
        module: &Module,
        prod: ProdFn,
        b: &MElt,
        normalize: bool,
    ) -> Result<Self> {
        assert!(self.slots >= 2, "right slot multiplication needs two slots");
        let src = if normalize { self.module_normalize(module) } else { self.clone() };
        let kernel = &module.kernel;
        let n = src.slots;
        let mut out = Self::zero(n);
        for (tuple, a) in &src.terms {
            for (legs, c) in kernel.mono_coproduct_legs(&tuple[n - 1], n) {
                let mut new_tuple = Vec::with_capacity(n);
                new_tuple.push(tuple[0].clone());
                for i in 1..n - 1 {
                    new_tuple.push(kernel.mono_mul(&tuple[i], &legs[i - 1]));
                }
                new_tuple.push(legs[n - 2].clone());
                let (sm, sc) = kernel.mono_antipode_inv(&legs[n - 1]);
                let tb = module.act_mono(&sm, b);
                let part = prod(a, &tb)?;
                out.add_term(module, new_tuple, module.elt_scale(&part, &(c * sc)));
            }
        }
        Ok(out.straighten(module))
    }

    /// Left multiplication by a module element:
    ///
    /// ```text
    /// a . (f1 (x) ... (x) fn (x)_H b)
    ///   = sum (f_(1) (x) f2 f_(2) (x) ... (x) f_{n-1} f_(n-1) (x) fn)
    ///         (x)_H (S^{-1}(f_(n)) a) . b
    /// ```
    ///
    /// with f = f1 spread through n legs.
    pub fn slot_mult_left(
        &self,
        module: &Module,
        prod: ProdFn,
        a: &MElt,
        normalize: bool,
    ) -> Result<Self> {
        assert!(self.slots >= 2, "left slot multiplication needs two slots");
        let src = if normalize { self.module_normalize(module) } else { self.clone() };
        let kernel = &module.kernel;
        let n = src.slots;
        let mut out = Self::zero(n);
        for (tuple, b) in &src.terms {
            for (legs, c) in kernel.mono_coproduct_legs(&tuple[0], n) {
                let mut new_tuple = Vec::with_capacity(n);
                new_tuple.push(legs[0].clone());
                for i in 1..n - 1 {
                    new_tuple.push(kernel.mono_mul(&tuple[i], &legs[i]));
                }
                new_tuple.push(tuple[n - 1].clone());
                let (sm, sc) = kernel.mono_antipode_inv(&legs[n - 1]);
                let ta = module.act_mono(&sm, a);
                let part = prod(&ta, b)?;
                out.add_term(module, new_tuple, module.elt_scale(&part, &(c * sc)));
            }
        }
        Ok(out.straighten(module))
    }

    /// Composes a bilinear table through two tensors: for terms (F, a) of
    /// `self` and (G, b) of `other`, every term (u (x) v) (x)_H c of
    /// `table(a, b)` contributes (F . spread(u) (x) G . spread(v)) (x)_H c,
    /// where spread pushes a monomial through the iterated coproduct across
    /// the respective slot group. This is how nested bracket values are
    /// evaluated.
    pub fn compose(
        &self,
        module: &Module,
        other: &Self,
        table: TableFn,
    ) -> Result<Self> {
        let kernel = &module.kernel;
        let n = self.slots;
        let m = other.slots;
        let mut out = Self::zero(n + m);
        for (ft, a) in &self.terms {
            for (gt, b) in &other.terms {
                let inner = table(a, b)?;
                assert_eq!(inner.slots, 2, "composition expects a 2-slot table");
                for (uv, c) in &inner.terms {
                    for (ulegs, uc) in kernel.mono_coproduct_legs(&uv[0], n) {
                        for (vlegs, vc) in kernel.mono_coproduct_legs(&uv[1], m) {
                            let mut tuple = Vec::with_capacity(n + m);
                            for i in 0..n {
                                tuple.push(kernel.mono_mul(&ft[i], &ulegs[i]));
                            }
                            for j in 0..m {
                                tuple.push(kernel.mono_mul(&gt[j], &vlegs[j]));
                            }
                            out.add_term(
                                module,
                                tuple,
                                module.elt_scale(c, &(&uc * &vc)),
                            );
                        }
                    }
                }
            }
        }
        Ok(out.straighten(module))
    }

    /// Canonical text form, a sum of `(m1, ..., mn)@(element)` pieces.
    pub fn fmt(&self, module: &Module) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let pieces: Vec<String> = self
            .terms
            .iter()
            .map(|(t, m)| {
                format!(
                    "{}@({})",
                    fmt_mono_tuple(&module.kernel, t),
                    module.fmt_elt(m)
                )
            })
            .collect();
        pieces.join(" + ")
    }
}
