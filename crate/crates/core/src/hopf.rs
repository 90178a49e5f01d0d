//! Cocommutative Hopf kernels and their elements.
//!
//! Two kernel families are supported, both with involutive antipode:
//!
//! * `Polynomial { vars }`: k[d1..dn] with primitive generators, i.e.
//!   Delta(d) = d(x)1 + 1(x)d, S(d) = -d, eps(d) = 0. Monomials are exponent
//!   tuples ordered degree-then-lexicographically.
//! * `Group { orders }`: k[Gamma] for the finite abelian group
//!   Gamma = Z/m1 x ... x Z/mk with grouplike basis, i.e. Delta(g) = g(x)g,
//!   S(g) = g^{-1}, eps(g) = 1. Monomials are residue tuples.
//!
//! Elements are finite rational combinations of monomials stored in canonical
//! map form, so structural equality is semantic equality.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::scalar::{binomial, fmt_signed_coeff, rat, sign_pow, Rat};

/// A concrete cocommutative Hopf kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kernel {
    /// k[d1..dn], primitive generators, exponent-tuple monomials.
    Polynomial { vars: usize },
    /// k[Z/m1 x ... x Z/mk], grouplike basis, residue-tuple monomials.
    Group { orders: Vec<u64> },
}

/// Basis monomial: exponents for the polynomial kernel, residues for the
/// group kernel. Length always equals the kernel's generator count.
pub type Mono = Vec<u64>;

impl Kernel {
    /// Number of algebra generators (variables resp. cyclic factors).
    pub fn gen_count(&self) -> usize {
        match self {
            Kernel::Polynomial { vars } => *vars,
            Kernel::Group { orders } => orders.len(),
        }
    }

    /// The basis monomial 1.
    pub fn unit_mono(&self) -> Mono {
        vec![0; self.gen_count()]
    }

    /// The i-th generator as a monomial.
    pub fn gen_mono(&self, i: usize) -> Mono {
        assert!(i < self.gen_count(), "generator index out of range");
        let mut m = self.unit_mono();
        m[i] = 1;
        if let Kernel::Group { orders } = self {
            m[i] %= orders[i];
        }
        m
    }

    /// Checks shape and, for group kernels, residue ranges.
    pub fn mono_is_valid(&self, m: &Mono) -> bool {
        if m.len() != self.gen_count() {
            return false;
        }
        match self {
            Kernel::Polynomial { .. } => true,
            Kernel::Group { orders } => m.iter().zip(orders).all(|(r, o)| r < o),
        }
    }

    fn assert_mono(&self, m: &Mono) {
        assert!(self.mono_is_valid(m), "monomial invalid for this kernel: {m:?}");
    }

    /// Product of basis monomials; coefficient is always 1 in both kernels.
    pub fn mono_mul(&self, a: &Mono, b: &Mono) -> Mono {
        self.assert_mono(a);
        self.assert_mono(b);
        match self {
            Kernel::Polynomial { .. } => a.iter().zip(b).map(|(x, y)| x + y).collect(),
            Kernel::Group { orders } => a
                .iter()
                .zip(b)
                .zip(orders)
                .map(|((x, y), o)| (x + y) % o)
                .collect(),
        }
    }

    /// Antipode of a basis monomial as (monomial, coefficient).
    ///
    /// Polynomial: S(d^a) = (-1)^{|a|} d^a. Group: S(g) = g^{-1}. Both kernels
    /// are cocommutative with S^2 = id.
    pub fn mono_antipode(&self, m: &Mono) -> (Mono, Rat) {
        self.assert_mono(m);
        match self {
            Kernel::Polynomial { .. } => {
                let deg: u64 = m.iter().sum();
                (m.clone(), sign_pow(deg as i64))
            }
            Kernel::Group { orders } => {
                let inv = m
                    .iter()
                    .zip(orders)
                    .map(|(r, o)| (o - r) % o)
                    .collect();
                (inv, rat(1))
            }
        }
    }

    /// Inverse antipode. Both kernels are cocommutative, so this coincides
    /// with the antipode; kept as a separate entry point because callers of
    /// the slot calculus are written against S^{-1}.
    pub fn mono_antipode_inv(&self, m: &Mono) -> (Mono, Rat) {
        self.mono_antipode(m)
    }

    /// Counit of a basis monomial.
    pub fn mono_counit(&self, m: &Mono) -> Rat {
        self.assert_mono(m);
        match self {
            Kernel::Polynomial { .. } => {
                if m.iter().all(|&e| e == 0) {
                    rat(1)
                } else {
                    rat(0)
                }
            }
            Kernel::Group { .. } => rat(1),
        }
    }

    /// All legs of the iterated coproduct Delta^{n-1} applied to a basis
    /// monomial: a list of (n-tuple of monomials, coefficient).
    ///
    /// Polynomial: d^a splits into all n-part compositions per variable with
    /// multinomial coefficients. Group: grouplikes copy themselves.
    pub fn mono_coproduct_legs(&self, m: &Mono, n: usize) -> Vec<(Vec<Mono>, Rat)> {
        self.assert_mono(m);
        assert!(n >= 1, "coproduct needs at least one leg");
        match self {
            Kernel::Group { .. } => vec![(vec![m.clone(); n], rat(1))],
            Kernel::Polynomial { vars } => {
                // Per-variable compositions combined as a cartesian product.
                let mut acc: Vec<(Vec<Mono>, Rat)> =
                    vec![(vec![self.unit_mono(); n], rat(1))];
                for v in 0..*vars {
                    let e = m[v];
                    let splits = compositions(e, n);
                    let mut next = Vec::with_capacity(acc.len() * splits.len());
                    for (legs, c) in &acc {
                        for (parts, mult) in &splits {
                            let mut legs2 = legs.clone();
                            for (leg, p) in legs2.iter_mut().zip(parts) {
                                leg[v] = *p;
                            }
                            next.push((legs2, c * mult));
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }

    /// Total degree for the graded-lex order; group monomials all have
    /// degree 0.
    pub fn mono_degree(&self, m: &Mono) -> u64 {
        match self {
            Kernel::Polynomial { .. } => m.iter().sum(),
            Kernel::Group { .. } => 0,
        }
    }

    /// Graded-lexicographic comparison (plain lexicographic on group
    /// residues).
    pub fn mono_cmp(&self, a: &Mono, b: &Mono) -> std::cmp::Ordering {
        self.mono_degree(a)
            .cmp(&self.mono_degree(b))
            .then_with(|| a.cmp(b))
    }

    /// Basis monomials up to total degree `max_deg` (polynomial) or the full
    /// finite basis (group, where the bound is ignored).
    pub fn basis(&self, max_deg: u64) -> Vec<Mono> {
        match self {
            Kernel::Polynomial { vars } => {
                let mut out = Vec::new();
                let mut cur = vec![0u64; *vars];
                enumerate_bounded(&mut cur, 0, max_deg, &mut out);
                out.sort_by(|a, b| self.mono_cmp(a, b));
                out
            }
            Kernel::Group { orders } => {
                let mut out = vec![self.unit_mono()];
                for (i, o) in orders.iter().enumerate() {
                    let mut next = Vec::with_capacity(out.len() * *o as usize);
                    for m in &out {
                        for r in 0..*o {
                            let mut m2 = m.clone();
                            m2[i] = r;
                            next.push(m2);
                        }
                    }
                    out = next;
                }
                out.sort();
                out
            }
        }
    }

    /// Order of the group for group kernels.
    pub fn group_order(&self) -> Option<u64> {
        match self {
            Kernel::Polynomial { .. } => None,
            Kernel::Group { orders } => Some(orders.iter().product()),
        }
    }

    /// Display name of the i-th generator: `d{i+1}` resp. `g{i+1}`.
    pub fn gen_name(&self, i: usize) -> String {
        match self {
            Kernel::Polynomial { .. } => format!("d{}", i + 1),
            Kernel::Group { .. } => format!("g{}", i + 1),
        }
    }

    /// Canonical text form of a basis monomial, `1` for the unit.
    pub fn fmt_mono(&self, m: &Mono) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if e == 1 {
                parts.push(self.gen_name(i));
            } else {
                parts.push(format!("{}^{}", self.gen_name(i), e));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// All ways to write `e` as an ordered sum of `n` nonnegative parts, with the
/// multinomial coefficient e! / (p1! ... pn!).
fn compositions(e: u64, n: usize) -> Vec<(Vec<u64>, Rat)> {
    fn rec(e: u64, i: usize, parts: &mut Vec<u64>, out: &mut Vec<(Vec<u64>, Rat)>) {
        if i + 1 == parts.len() {
            parts[i] = e;
            // Multinomial: pick each part out of what is still unassigned.
            let mut c = rat(1);
            let mut left: u64 = parts.iter().sum();
            for &p in parts.iter() {
                c = c * binomial(left, p);
                left -= p;
            }
            out.push((parts.clone(), c));
            parts[i] = 0;
            return;
        }
        for p in 0..=e {
            parts[i] = p;
            rec(e - p, i + 1, parts, out);
        }
        parts[i] = 0;
    }
    let mut out = Vec::new();
    let mut parts = vec![0u64; n];
    rec(e, 0, &mut parts, &mut out);
    out
}

fn enumerate_bounded(cur: &mut Vec<u64>, i: usize, budget: u64, out: &mut Vec<Mono>) {
    if i == cur.len() {
        out.push(cur.clone());
        return;
    }
    for e in 0..=budget {
        cur[i] = e;
        enumerate_bounded(cur, i + 1, budget - e, out);
    }
    cur[i] = 0;
}

/// A finite rational combination of kernel basis monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopfElement {
    kernel: Kernel,
    terms: BTreeMap<Mono, Rat>,
}

impl HopfElement {
    pub fn zero(kernel: &Kernel) -> Self {
        HopfElement { kernel: kernel.clone(), terms: BTreeMap::new() }
    }

    pub fn unit(kernel: &Kernel) -> Self {
        Self::from_mono(kernel, kernel.unit_mono())
    }

    pub fn from_mono(kernel: &Kernel, m: Mono) -> Self {
        Self::from_term(kernel, m, rat(1))
    }

    pub fn from_term(kernel: &Kernel, m: Mono, c: Rat) -> Self {
        assert!(kernel.mono_is_valid(&m), "monomial invalid for this kernel");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        HopfElement { kernel: kernel.clone(), terms }
    }

    /// The i-th generator as an element.
    pub fn gen(kernel: &Kernel, i: usize) -> Self {
        Self::from_mono(kernel, kernel.gen_mono(i))
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        assert!(self.kernel.mono_is_valid(&m), "monomial invalid for this kernel");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn assert_same_kernel(&self, other: &Self) {
        assert!(self.kernel == other.kernel, "kernel mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_kernel(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(&self.kernel);
        }
        HopfElement {
            kernel: self.kernel.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_kernel(other);
        let mut out = Self::zero(&self.kernel);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(self.kernel.mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    /// Multiplies by a single basis monomial.
    pub fn mul_mono(&self, m: &Mono) -> Self {
        let mut out = Self::zero(&self.kernel);
        for (ma, ca) in &self.terms {
            out.add_term(self.kernel.mono_mul(ma, m), ca.clone());
        }
        out
    }

    pub fn antipode(&self) -> Self {
        let mut out = Self::zero(&self.kernel);
        for (m, c) in &self.terms {
            let (m2, s) = self.kernel.mono_antipode(m);
            out.add_term(m2, c * s);
        }
        out
    }

    /// S^{-1}; equal to S on these kernels.
    pub fn antipode_inv(&self) -> Self {
        self.antipode()
    }

    pub fn counit(&self) -> Rat {
        let mut out = Rat::zero();
        for (m, c) in &self.terms {
            out += c * self.kernel.mono_counit(m);
        }
        out
    }

    /// Legs of Delta^{n-1} applied to the whole element.
    pub fn coproduct_legs(&self, n: usize) -> Vec<(Vec<Mono>, Rat)> {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            for (legs, lc) in self.kernel.mono_coproduct_legs(m, n) {
                out.push((legs, c * lc));
            }
        }
        out
    }
}

impl fmt::Display for HopfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut monos: Vec<&Mono> = self.terms.keys().collect();
        monos.sort_by(|a, b| self.kernel.mono_cmp(a, b));
        let mut first = true;
        for m in monos {
            let c = &self.terms[m];
            let (neg, mag) = fmt_signed_coeff(c);
            let body = self.kernel.fmt_mono(m);
            let piece = if body == "1" {
                mag
            } else if mag == "1" {
                body
            } else {
                format!("{mag} {body}")
            };
            if first {
                if neg {
                    write!(f, "-{piece}")?;
                } else {
                    write!(f, "{piece}")?;
                }
                first = false;
            } else if neg {
                write!(f, " - {piece}")?;
            } else {
                write!(f, " + {piece}")?;
            }
        }
        Ok(())
    }
}

/// Convenience formatter for a tuple of monomials, `(d1^2, 1)` style.
pub fn fmt_mono_tuple(kernel: &Kernel, tup: &[Mono]) -> String {
    let inner: Vec<String> = tup.iter().map(|m| kernel.fmt_mono(m)).collect();
    format!("({})", inner.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratq;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn poly2() -> Kernel {
        Kernel::Polynomial { vars: 2 }
    }

    fn z2() -> Kernel {
        Kernel::Group { orders: vec![2] }
    }

    fn z2z2() -> Kernel {
        Kernel::Group { orders: vec![2, 2] }
    }

    #[test]
    fn coproduct_of_square_has_middle_coefficient_two() {
        let k = Kernel::Polynomial { vars: 1 };
        let legs = k.mono_coproduct_legs(&vec![2], 2);
        // d^2 -> d^2(x)1 + 2 d(x)d + 1(x)d^2
        let mut map = BTreeMap::new();
        for (l, c) in legs {
            map.insert((l[0].clone(), l[1].clone()), c);
        }
        assert_eq!(map.len(), 3);
        assert_eq!(map[&(vec![2], vec![0])], rat(1));
        assert_eq!(map[&(vec![1], vec![1])], rat(2));
        assert_eq!(map[&(vec![0], vec![2])], rat(1));
    }

    #[test]
    fn three_leg_coproduct_multinomials() {
        let k = Kernel::Polynomial { vars: 1 };
        let legs = k.mono_coproduct_legs(&vec![3], 3);
        let total: Rat = legs.iter().map(|(_, c)| c.clone()).sum();
        // Sum of multinomial coefficients for e=3 over 3 slots is 3^3.
        assert_eq!(total, rat(27));
        let mid = legs
            .iter()
            .find(|(l, _)| l == &vec![vec![1], vec![1], vec![1]])
            .unwrap();
        assert_eq!(mid.1, rat(6));
    }

    #[test]
    fn group_antipode_inverts() {
        let k = Kernel::Group { orders: vec![4] };
        let (inv, c) = k.mono_antipode(&vec![3]);
        assert_eq!(inv, vec![1]);
        assert_eq!(c, rat(1));
        assert_eq!(k.mono_mul(&vec![3], &inv), k.unit_mono());
    }

    #[test]
    fn polynomial_antipode_sign() {
        let k = poly2();
        let e = HopfElement::from_mono(&k, vec![2, 1]);
        let s = e.antipode();
        assert_eq!(s, e.scale(&rat(-1)));
        let e2 = HopfElement::from_mono(&k, vec![1, 1]);
        assert_eq!(e2.antipode(), e2);
    }

    #[test]
    fn element_arithmetic_and_display() {
        let k = poly2();
        let d1 = HopfElement::gen(&k, 0);
        let d2 = HopfElement::gen(&k, 1);
        let e = d1.mul(&d1).sub(&d2.scale(&ratq(1, 3))).add(&HopfElement::unit(&k));
        assert_eq!(e.to_string(), "1 - 1/3 d2 + d1^2");
        let g = z2z2();
        let x = HopfElement::gen(&g, 0).mul(&HopfElement::gen(&g, 1));
        assert_eq!(x.to_string(), "g1*g2");
    }

    #[test]
    fn basis_enumeration_sizes() {
        assert_eq!(poly2().basis(3).len(), 10);
        assert_eq!(z2().basis(0).len(), 2);
        assert_eq!(z2z2().basis(0).len(), 4);
        assert_eq!(Kernel::Group { orders: vec![3] }.basis(0).len(), 3);
    }

    fn arb_kernel() -> impl Strategy<Value = Kernel> {
        prop_oneof![
            (1usize..=2).prop_map(|vars| Kernel::Polynomial { vars }),
            prop_oneof![
                Just(Kernel::Group { orders: vec![2] }),
                Just(Kernel::Group { orders: vec![3] }),
                Just(Kernel::Group { orders: vec![2, 2] }),
            ],
        ]
    }

    fn arb_mono(kernel: Kernel) -> impl Strategy<Value = (Kernel, Mono)> {
        let k2 = kernel.clone();
        match kernel {
            Kernel::Polynomial { vars } => proptest::collection::vec(0u64..=3, vars)
                .prop_map(move |m| (k2.clone(), m))
                .boxed(),
            Kernel::Group { ref orders } => {
                let ranges: Vec<_> = orders.iter().map(|&o| 0u64..o).collect();
                ranges.prop_map(move |m| (k2.clone(), m)).boxed()
            }
        }
    }

    fn arb_kernel_mono() -> impl Strategy<Value = (Kernel, Mono)> {
        arb_kernel().prop_flat_map(arb_mono)
    }

    proptest! {
        // Coassociativity: splitting into 3 legs equals splitting twice.
        #[test]
        fn coproduct_coassociative((kernel, m) in arb_kernel_mono()) {
            let direct = kernel.mono_coproduct_legs(&m, 3);
            let mut lhs: BTreeMap<Vec<Mono>, Rat> = BTreeMap::new();
            for (legs, c) in direct {
                *lhs.entry(legs).or_insert_with(Rat::zero) += c;
            }
            let mut rhs: BTreeMap<Vec<Mono>, Rat> = BTreeMap::new();
            for (legs, c) in kernel.mono_coproduct_legs(&m, 2) {
                for (sub, c2) in kernel.mono_coproduct_legs(&legs[0], 2) {
                    let key = vec![sub[0].clone(), sub[1].clone(), legs[1].clone()];
                    *rhs.entry(key).or_insert_with(Rat::zero) += &c * &c2;
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            prop_assert_eq!(lhs, rhs);
        }

        // Counit axiom: (eps (x) id) Delta = id.
        #[test]
        fn counit_axiom((kernel, m) in arb_kernel_mono()) {
            let mut out = HopfElement::zero(&kernel);
            for (legs, c) in kernel.mono_coproduct_legs(&m, 2) {
                let e = kernel.mono_counit(&legs[0]);
                out.add_term(legs[1].clone(), c * e);
            }
            prop_assert_eq!(out, HopfElement::from_mono(&kernel, m));
        }

        // Convolution inverse: m(S (x) id) Delta = unit * eps.
        #[test]
        fn antipode_convolution_inverse((kernel, m) in arb_kernel_mono()) {
            let mut out = HopfElement::zero(&kernel);
            for (legs, c) in kernel.mono_coproduct_legs(&m, 2) {
                let (sm, sc) = kernel.mono_antipode(&legs[0]);
                out.add_term(kernel.mono_mul(&sm, &legs[1]), c * sc);
            }
            let expected = HopfElement::from_term(
                &kernel,
                kernel.unit_mono(),
                kernel.mono_counit(&m),
            );
            prop_assert_eq!(out, expected);
        }

        // S^2 = id and cocommutativity of the 2-leg coproduct.
        #[test]
        fn antipode_involutive_and_cocommutative((kernel, m) in arb_kernel_mono()) {
            let e = HopfElement::from_mono(&kernel, m.clone());
            prop_assert_eq!(e.antipode().antipode(), e);
            let mut fwd: BTreeMap<(Mono, Mono), Rat> = BTreeMap::new();
            let mut rev: BTreeMap<(Mono, Mono), Rat> = BTreeMap::new();
            for (legs, c) in kernel.mono_coproduct_legs(&m, 2) {
                *fwd.entry((legs[0].clone(), legs[1].clone())).or_insert_with(Rat::zero) += c.clone();
                *rev.entry((legs[1].clone(), legs[0].clone())).or_insert_with(Rat::zero) += c;
            }
            prop_assert_eq!(fwd, rev);
        }

        // S is an algebra anti-homomorphism (= homomorphism here, commutative).
        #[test]
        fn antipode_antihomomorphism(
            (kernel, a) in arb_kernel_mono().prop_filter("same kernel", |_| true),
            seed in 0u64..1000,
        ) {
            // Derive a second monomial from the same kernel deterministically.
            let basis = kernel.basis(3);
            let b = basis[(seed as usize) % basis.len()].clone();
            let ea = HopfElement::from_mono(&kernel, a);
            let eb = HopfElement::from_mono(&kernel, b);
            prop_assert_eq!(ea.mul(&eb).antipode(), eb.antipode().mul(&ea.antipode()));
        }

        // Delta is multiplicative: legs of a product = products of legs.
        #[test]
        fn coproduct_multiplicative((kernel, a) in arb_kernel_mono(), seed in 0u64..1000) {
            let basis = kernel.basis(2);
            let b = basis[(seed as usize) % basis.len()].clone();
            let prod = kernel.mono_mul(&a, &b);
            let mut lhs: BTreeMap<Vec<Mono>, Rat> = BTreeMap::new();
            for (legs, c) in kernel.mono_coproduct_legs(&prod, 2) {
                *lhs.entry(legs).or_insert_with(Rat::zero) += c;
            }
            let mut rhs: BTreeMap<Vec<Mono>, Rat> = BTreeMap::new();
            for (la, ca) in kernel.mono_coproduct_legs(&a, 2) {
                for (lb, cb) in kernel.mono_coproduct_legs(&b, 2) {
                    let key = vec![
                        kernel.mono_mul(&la[0], &lb[0]),
                        kernel.mono_mul(&la[1], &lb[1]),
                    ];
                    *rhs.entry(key).or_insert_with(Rat::zero) += &ca * &cb;
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
