//! Modules over a Hopf kernel, their elements, maps and gradings.
//!
//! Two presentations:
//!
//! * `Free { rank }`: a free module H^rank; elements are tuples of kernel
//!   elements attached to the generators.
//! * `FiniteDim { dim, action }`: a finite-dimensional module with one action
//!   matrix per kernel generator. Matrices must pairwise commute, and for
//!   group kernels satisfy the order relations of their cyclic factors.
//!
//! The cohomological grading used by differential structures lives on module
//! generators; kernel coefficients never move the degree.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hopf::{HopfElement, Kernel, Mono};
use crate::linalg::Mat;
use crate::scalar::{fmt_rat, fmt_signed_coeff, rat, Rat};

/// How a module is given.
#[derive(Debug, Clone)]
pub enum Presentation {
    Free { rank: usize },
    FiniteDim { dim: usize, action: Vec<Mat> },
}

/// A module over a fixed kernel.
#[derive(Debug, Clone)]
pub struct Module {
    pub kernel: Kernel,
    pub presentation: Presentation,
}

/// A module element, matching the presentation of its module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MElt {
    /// Kernel coefficients per free generator.
    Free(Vec<HopfElement>),
    /// Rational coordinates per basis vector.
    Fin(Vec<Rat>),
}

impl Module {
    pub fn free(kernel: &Kernel, rank: usize) -> Self {
        Module { kernel: kernel.clone(), presentation: Presentation::Free { rank } }
    }

    pub fn finite(kernel: &Kernel, action: Vec<Mat>) -> Result<Self> {
        let dim = action.first().map_or(0, |m| m.rows);
        let m = Module {
            kernel: kernel.clone(),
            presentation: Presentation::FiniteDim { dim, action },
        };
        m.validate()?;
        Ok(m)
    }

    /// Number of generators: free rank or basis dimension.
    pub fn gens(&self) -> usize {
        match &self.presentation {
            Presentation::Free { rank } => *rank,
            Presentation::FiniteDim { dim, .. } => *dim,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self.presentation, Presentation::Free { .. })
    }

    /// Checks shape, commutation, and group order relations of the action.
    pub fn validate(&self) -> Result<()> {
        let Presentation::FiniteDim { dim, action } = &self.presentation else {
            return Ok(());
        };
        if action.len() != self.kernel.gen_count() {
            return Err(Error::InvalidModule(format!(
                "expected {} action matrices, got {}",
                self.kernel.gen_count(),
                action.len()
            )));
        }
        for (i, a) in action.iter().enumerate() {
            if a.rows != *dim || a.cols != *dim {
                return Err(Error::InvalidModule(format!(
                    "action matrix {} is {}x{}, expected {dim}x{dim}",
                    i + 1,
                    a.rows,
                    a.cols
                )));
            }
        }
        for i in 0..action.len() {
            for j in (i + 1)..action.len() {
                if action[i].mul(&action[j]) != action[j].mul(&action[i]) {
                    return Err(Error::InvalidModule(format!(
                        "action matrices {} and {} do not commute",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if let Kernel::Group { orders } = &self.kernel {
            for (i, (a, o)) in action.iter().zip(orders).enumerate() {
                if a.pow(*o) != Mat::identity(*dim) {
                    return Err(Error::InvalidModule(format!(
                        "action matrix {} does not satisfy its order relation {}",
                        i + 1,
                        o
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn zero_elt(&self) -> MElt {
        match &self.presentation {
            Presentation::Free { rank } => {
                MElt::Free(vec![HopfElement::zero(&self.kernel); *rank])
            }
            Presentation::FiniteDim { dim, .. } => MElt::Fin(vec![Rat::zero(); *dim]),
        }
    }

    pub fn gen_elt(&self, i: usize) -> MElt {
        assert!(i < self.gens(), "generator index out of range");
        let mut z = self.zero_elt();
        match &mut z {
            MElt::Free(v) => v[i] = HopfElement::unit(&self.kernel),
            MElt::Fin(v) => v[i] = rat(1),
        }
        z
    }

    fn check_elt(&self, x: &MElt) {
        let ok = match (&self.presentation, x) {
            (Presentation::Free { rank }, MElt::Free(v)) => v.len() == *rank,
            (Presentation::FiniteDim { dim, .. }, MElt::Fin(v)) => v.len() == *dim,
            _ => false,
        };
        assert!(ok, "element does not match module presentation");
    }

    /// Action of a single basis monomial.
    pub fn act_mono(&self, m: &Mono, x: &MElt) -> MElt {
        self.check_elt(x);
        match (&self.presentation, x) {
            (Presentation::Free { .. }, MElt::Free(v)) => {
                MElt::Free(v.iter().map(|h| h.mul_mono(m)).collect())
            }
            (Presentation::FiniteDim { .. }, MElt::Fin(v)) => {
                MElt::Fin(self.mono_matrix(m).apply(v))
            }
            _ => unreachable!(),
        }
    }

    /// Action of an arbitrary kernel element.
    pub fn act(&self, h: &HopfElement, x: &MElt) -> MElt {
        assert!(h.kernel() == &self.kernel, "kernel mismatch");
        let mut out = self.zero_elt();
        for (m, c) in h.terms() {
            out = self.elt_add(&out, &self.elt_scale(&self.act_mono(m, x), c));
        }
        out
    }

    /// The matrix by which a basis monomial acts on a finite-dimensional
    /// module: product of generator matrix powers.
    pub fn mono_matrix(&self, m: &Mono) -> Mat {
        let Presentation::FiniteDim { dim, action } = &self.presentation else {
            panic!("mono_matrix on a free module");
        };
        let mut out = Mat::identity(*dim);
        for (a, &e) in action.iter().zip(m) {
            if e > 0 {
                out = out.mul(&a.pow(e));
            }
        }
        out
    }

    pub fn elt_add(&self, a: &MElt, b: &MElt) -> MElt {
        self.check_elt(a);
        self.check_elt(b);
        match (a, b) {
            (MElt::Free(x), MElt::Free(y)) => {
                MElt::Free(x.iter().zip(y).map(|(p, q)| p.add(q)).collect())
            }
            (MElt::Fin(x), MElt::Fin(y)) => {
                MElt::Fin(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            _ => unreachable!(),
        }
    }

    pub fn elt_sub(&self, a: &MElt, b: &MElt) -> MElt {
        self.elt_add(a, &self.elt_scale(b, &rat(-1)))
    }

    pub fn elt_scale(&self, a: &MElt, c: &Rat) -> MElt {
        self.check_elt(a);
        match a {
            MElt::Free(x) => MElt::Free(x.iter().map(|p| p.scale(c)).collect()),
            MElt::Fin(x) => MElt::Fin(x.iter().map(|p| p * c).collect()),
        }
    }

    pub fn elt_is_zero(&self, a: &MElt) -> bool {
        match a {
            MElt::Free(x) => x.iter().all(|p| p.is_zero()),
            MElt::Fin(x) => x.iter().all(|p| p.is_zero()),
        }
    }

    /// Canonical text form of an element, e.g. `2 e1 - (d1)@(e2)`.
    pub fn fmt_elt(&self, a: &MElt) -> String {
        self.check_elt(a);
        let mut pieces: Vec<(bool, String)> = Vec::new();
        match a {
            MElt::Fin(v) => {
                for (i, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let (neg, mag) = fmt_signed_coeff(c);
                    let body = if mag == "1" {
                        format!("e{}", i + 1)
                    } else {
                        format!("{mag} e{}", i + 1)
                    };
                    pieces.push((neg, body));
                }
            }
            MElt::Free(v) => {
                for (i, h) in v.iter().enumerate() {
                    let mut monos: Vec<(&Mono, &Rat)> = h.terms().collect();
                    monos.sort_by(|a, b| self.kernel.mono_cmp(a.0, b.0));
                    for (m, c) in monos {
                        let (neg, mag) = fmt_signed_coeff(c);
                        let is_unit = m.iter().all(|&e| e == 0);
                        let body = if is_unit {
                            if mag == "1" {
                                format!("e{}", i + 1)
                            } else {
                                format!("{mag} e{}", i + 1)
                            }
                        } else {
                            let mono = self.kernel.fmt_mono(m);
                            if mag == "1" {
                                format!("({mono})@(e{})", i + 1)
                            } else {
                                format!("({mono})@({mag} e{})", i + 1)
                            }
                        };
                        pieces.push((neg, body));
                    }
                }
            }
        }
        if pieces.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (neg, body)) in pieces.iter().enumerate() {
            if k == 0 {
                if *neg {
                    out.push('-');
                }
                out.push_str(body);
            } else {
                out.push_str(if *neg { " - " } else { " + " });
                out.push_str(body);
            }
        }
        out
    }

    /// Coordinates of an element of a finite-dimensional module.
    pub fn fin_coords<'a>(&self, a: &'a MElt) -> &'a [Rat] {
        match a {
            MElt::Fin(v) => v,
            MElt::Free(_) => panic!("free element where coordinates were expected"),
        }
    }

    /// Converts a free module over a group kernel into a finite-dimensional
    /// one on the basis e_i (x) gamma, index `i * |Gamma| + j` with `j` the
    /// position of gamma in the kernel basis. Returns the module together
    /// with the conversion of elements.
    pub fn finitize(&self) -> Result<(Module, Vec<Mono>)> {
        let Presentation::Free { rank } = self.presentation else {
            return Err(Error::InvalidModule("finitize expects a free module".into()));
        };
        let Kernel::Group { .. } = &self.kernel else {
            return Err(Error::Unsupported(
                "a free module over a polynomial kernel is not finite-dimensional".into(),
            ));
        };
        let gb = self.kernel.basis(0);
        let n = gb.len();
        let dim = rank * n;
        let mut action = Vec::new();
        for g in 0..self.kernel.gen_count() {
            let gm = self.kernel.gen_mono(g);
            let mut a = Mat::zero(dim, dim);
            for i in 0..rank {
                for (j, mono) in gb.iter().enumerate() {
                    let prod = self.kernel.mono_mul(&gm, mono);
                    let jj = gb.iter().position(|m| m == &prod).unwrap();
                    a[(i * n + jj, i * n + j)] = rat(1);
                }
            }
            action.push(a);
        }
        let m = Module::finite(&self.kernel, action)?;
        Ok((m, gb))
    }

    /// Element conversion matching [`Module::finitize`].
    pub fn elt_to_fin(&self, group_basis: &[Mono], x: &MElt) -> MElt {
        let MElt::Free(v) = x else { panic!("expected a free element") };
        let n = group_basis.len();
        let mut out = vec![Rat::zero(); v.len() * n];
        for (i, h) in v.iter().enumerate() {
            for (m, c) in h.terms() {
                let j = group_basis.iter().position(|b| b == m).unwrap();
                out[i * n + j] = c.clone();
            }
        }
        MElt::Fin(out)
    }

    /// Inverse of [`Module::elt_to_fin`].
    pub fn elt_from_fin(&self, group_basis: &[Mono], x: &MElt) -> MElt {
        let MElt::Fin(v) = x else { panic!("expected coordinates") };
        let n = group_basis.len();
        let rank = v.len() / n;
        let mut out = vec![HopfElement::zero(&self.kernel); rank];
        for i in 0..rank {
            for (j, mono) in group_basis.iter().enumerate() {
                let c = &v[i * n + j];
                if !c.is_zero() {
                    out[i].add_term(mono.clone(), c.clone());
                }
            }
        }
        MElt::Free(out)
    }
}

/// Grading of module generators plus the degree shift of the bracket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    pub degrees: Vec<i64>,
    /// Bracket degree shift; products are always degree-additive.
    pub p: i64,
}

impl Grading {
    pub fn trivial(gens: usize) -> Self {
        Grading { degrees: vec![0; gens], p: 0 }
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    /// Degree of a homogeneous element; `Ok(None)` for zero, error with the
    /// mixed degrees otherwise.
    pub fn elt_degree(&self, module: &Module, x: &MElt) -> Result<Option<i64>> {
        let mut found: Option<i64> = None;
        let mut mixed = false;
        let mut seen = |deg: i64| match found {
            None => found = Some(deg),
            Some(d) if d != deg => mixed = true,
            _ => {}
        };
        match x {
            MElt::Fin(v) => {
                for (i, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        seen(self.degrees[i]);
                    }
                }
            }
            MElt::Free(v) => {
                for (i, h) in v.iter().enumerate() {
                    if !h.is_zero() {
                        seen(self.degrees[i]);
                    }
                }
            }
        }
        if mixed {
            return Err(Error::InvalidGrading(format!(
                "element is not homogeneous: {}",
                module.fmt_elt(x)
            )));
        }
        Ok(found)
    }

    /// Splits an element into homogeneous components, ordered by degree.
    pub fn components(&self, module: &Module, x: &MElt) -> Vec<(i64, MElt)> {
        let mut degs: Vec<i64> = self.degrees.clone();
        degs.sort();
        degs.dedup();
        let mut out = Vec::new();
        for d in degs {
            let mut comp = module.zero_elt();
            let mut nonzero = false;
            match (x, &mut comp) {
                (MElt::Fin(v), MElt::Fin(c)) => {
                    for i in 0..v.len() {
                        if self.degrees[i] == d && !v[i].is_zero() {
                            c[i] = v[i].clone();
                            nonzero = true;
                        }
                    }
                }
                (MElt::Free(v), MElt::Free(c)) => {
                    for i in 0..v.len() {
                        if self.degrees[i] == d && !v[i].is_zero() {
                            c[i] = v[i].clone();
                            nonzero = true;
                        }
                    }
                }
                _ => unreachable!(),
            }
            if nonzero {
                out.push((d, comp));
            }
        }
        out
    }

    /// A graded action must preserve generator degrees: matrix entries may
    /// only connect equal degrees.
    pub fn validate_action(&self, module: &Module) -> Result<()> {
        if self.degrees.len() != module.gens() {
            return Err(Error::InvalidGrading(format!(
                "grading lists {} degrees for {} generators",
                self.degrees.len(),
                module.gens()
            )));
        }
        if let Presentation::FiniteDim { dim, action } = &module.presentation {
            for (g, a) in action.iter().enumerate() {
                for i in 0..*dim {
                    for j in 0..*dim {
                        if !a[(i, j)].is_zero() && self.degrees[i] != self.degrees[j] {
                            return Err(Error::InvalidGrading(format!(
                                "action matrix {} maps degree {} into degree {}",
                                g + 1,
                                self.degrees[j],
                                self.degrees[i]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// An H-linear map given by the images of the source generators.
///
/// For a free source the kernel coefficients pass through the map, so the
/// columns alone determine it; for a finite-dimensional source the columns
/// must additionally intertwine the actions, which [`HMap::validate`] checks.
#[derive(Debug, Clone)]
pub struct HMap {
    pub columns: Vec<MElt>,
}

impl HMap {
    pub fn identity(module: &Module) -> Self {
        HMap { columns: (0..module.gens()).map(|i| module.gen_elt(i)).collect() }
    }

    pub fn zero(source: &Module, target: &Module) -> Self {
        HMap { columns: vec![target.zero_elt(); source.gens()] }
    }

    pub fn apply(&self, source: &Module, target: &Module, x: &MElt) -> MElt {
        let mut out = target.zero_elt();
        match x {
            MElt::Fin(v) => {
                assert_eq!(v.len(), self.columns.len(), "shape mismatch");
                for (c, col) in v.iter().zip(&self.columns) {
                    out = target.elt_add(&out, &target.elt_scale(col, c));
                }
            }
            MElt::Free(v) => {
                assert_eq!(v.len(), self.columns.len(), "shape mismatch");
                assert!(source.kernel == target.kernel, "kernel mismatch");
                for (h, col) in v.iter().zip(&self.columns) {
                    out = target.elt_add(&out, &target.act(h, col));
                }
            }
        }
        out
    }

    /// H-linearity: automatic for free sources, an intertwining condition on
    /// finite-dimensional ones.
    pub fn validate(&self, source: &Module, target: &Module) -> Result<()> {
        if self.columns.len() != source.gens() {
            return Err(Error::InvalidMap(format!(
                "map lists {} columns for {} source generators",
                self.columns.len(),
                source.gens()
            )));
        }
        if source.is_free() {
            return Ok(());
        }
        for g in 0..source.kernel.gen_count() {
            let gm = source.kernel.gen_mono(g);
            for i in 0..source.gens() {
                let lhs = self.apply(source, target, &source.act_mono(&gm, &source.gen_elt(i)));
                let rhs = target.act_mono(&gm, &self.apply(source, target, &source.gen_elt(i)));
                if lhs != rhs {
                    return Err(Error::InvalidMap(format!(
                        "map does not commute with the action of {} on e{}",
                        source.kernel.gen_name(g),
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, mid: &Module, target: &Module, first: &HMap) -> HMap {
        HMap {
            columns: first
                .columns
                .iter()
                .map(|c| self.apply(mid, target, c))
                .collect(),
        }
    }

    pub fn add(&self, target: &Module, other: &HMap) -> HMap {
        assert_eq!(self.columns.len(), other.columns.len());
        HMap {
            columns: self
                .columns
                .iter()
                .zip(&other.columns)
                .map(|(a, b)| target.elt_add(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, target: &Module, c: &Rat) -> HMap {
        HMap { columns: self.columns.iter().map(|x| target.elt_scale(x, c)).collect() }
    }

    /// Degree shift of a graded map; `Ok(None)` for the zero map.
    pub fn degree_shift(
        &self,
        source: &Module,
        target: &Module,
        sg: &Grading,
        tg: &Grading,
    ) -> Result<Option<i64>> {
        let mut shift: Option<i64> = None;
        for (i, col) in self.columns.iter().enumerate() {
            let Some(d) = tg.elt_degree(target, col)? else { continue };
            let s = d - sg.degree(i);
            match shift {
                None => shift = Some(s),
                Some(prev) if prev != s => {
                    return Err(Error::InvalidMap(format!(
                        "map shifts e{} by {} but earlier generators by {}",
                        i + 1,
                        s,
                        prev
                    )))
                }
                _ => {}
            }
        }
        let _ = source;
        Ok(shift)
    }

    /// Matrix of the map between finite-dimensional modules.
    pub fn matrix(&self, target: &Module) -> Mat {
        let dim = target.gens();
        let mut m = Mat::zero(dim, self.columns.len());
        for (j, col) in self.columns.iter().enumerate() {
            for (i, c) in target.fin_coords(col).iter().enumerate() {
                m[(i, j)] = c.clone();
            }
        }
        m
    }
}

/// Zero element display helper shared by reports.
pub fn fmt_rat_list(v: &[Rat]) -> String {
    let inner: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("[{}]", inner.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratq;

    fn z2() -> Kernel {
        Kernel::Group { orders: vec![2] }
    }

    fn poly1() -> Kernel {
        Kernel::Polynomial { vars: 1 }
    }

    fn swap2() -> Mat {
        let mut m = Mat::zero(2, 2);
        m[(0, 1)] = rat(1);
        m[(1, 0)] = rat(1);
        m
    }

    #[test]
    fn finite_module_validation() {
        let k = z2();
        assert!(Module::finite(&k, vec![swap2()]).is_ok());
        // A matrix of order 3 cannot act for Z/2.
        let mut rot = Mat::zero(3, 3);
        rot[(0, 1)] = rat(1);
        rot[(1, 2)] = rat(1);
        rot[(2, 0)] = rat(1);
        assert!(Module::finite(&k, vec![rot]).is_err());
    }

    #[test]
    fn free_action_is_coefficient_multiplication() {
        let k = poly1();
        let m = Module::free(&k, 2);
        let x = m.gen_elt(1);
        let d = HopfElement::gen(&k, 0);
        let dx = m.act(&d, &x);
        assert_eq!(m.fmt_elt(&dx), "(d1)@(e2)");
        let y = m.elt_add(&m.elt_scale(&m.gen_elt(0), &ratq(1, 2)), &dx);
        assert_eq!(m.fmt_elt(&y), "1/2 e1 + (d1)@(e2)");
    }

    #[test]
    fn finite_action_applies_matrices() {
        let k = z2();
        let m = Module::finite(&k, vec![swap2()]).unwrap();
        let g = HopfElement::gen(&k, 0);
        let e1 = m.gen_elt(0);
        assert_eq!(m.act(&g, &e1), m.gen_elt(1));
        assert_eq!(m.act(&g.mul(&g), &e1), e1);
    }

    #[test]
    fn finitize_round_trip_and_equivariance() {
        let k = z2();
        let free = Module::free(&k, 2);
        let (fin, gb) = free.finitize().unwrap();
        assert_eq!(fin.gens(), 4);
        let g = HopfElement::gen(&k, 0);
        let x = MElt::Free(vec![g.clone().add(&HopfElement::unit(&k)), g.clone()]);
        let xf = free.elt_to_fin(&gb, &x);
        assert_eq!(free.elt_from_fin(&gb, &xf), x);
        // Conversion intertwines the actions.
        let lhs = free.elt_to_fin(&gb, &free.act(&g, &x));
        let rhs = fin.act(&g, &xf);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn grading_components_and_validation() {
        let k = z2();
        let m = Module::finite(&k, vec![Mat::identity(3)]).unwrap();
        let g = Grading { degrees: vec![0, 1, 1], p: 0 };
        g.validate_action(&m).unwrap();
        let x = MElt::Fin(vec![rat(2), rat(0), rat(5)]);
        let comps = g.components(&m, &x);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].0, 0);
        assert_eq!(comps[1].0, 1);
        assert!(g.elt_degree(&m, &x).is_err());
        // Swap mixes degrees 0 and 1: not degree-preserving for this grading.
        let m2 = Module::finite(&k, vec![swap2()]).unwrap();
        let g2 = Grading { degrees: vec![0, 1], p: 0 };
        assert!(g2.validate_action(&m2).is_err());
    }

    #[test]
    fn hmap_linearity_check() {
        let k = z2();
        let m = Module::finite(&k, vec![swap2()]).unwrap();
        // Projection onto the swap-invariant line is equivariant.
        let inv = MElt::Fin(vec![ratq(1, 2), ratq(1, 2)]);
        let ok = HMap { columns: vec![inv.clone(), inv] };
        ok.validate(&m, &m).unwrap();
        // Sending e1 to e1 and e2 to 0 is not.
        let bad = HMap { columns: vec![m.gen_elt(0), m.zero_elt()] };
        assert!(bad.validate(&m, &m).is_err());
    }
}
