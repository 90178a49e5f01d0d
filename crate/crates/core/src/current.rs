//! Classical base algebras over the rationals and their current structures.
//!
//! A base algebra is an ordinary finite-dimensional algebra given by
//! structure constants, carrying a product, a bracket, or both. The current
//! construction places such an algebra in the first-slot world: the free
//! module H (x) A with bracket
//!
//! ```text
//! {(f (x) a) * (g (x) b)} = (f (x) g) (x)_H (1 (x) {a, b})
//! ```
//!
//! and, when the base is commutative Poisson, the first-slot product
//! (f (x) a)(g (x) b) = fg (x) (a.b).

use num_traits::Zero;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hopf::Kernel;
use crate::module::Module;
use crate::polytensor::PolyTensor;
use crate::report::{LawRecord, LawRun};
use crate::scalar::{fmt_rat, Rat};
use crate::structure::{Bracket, Product, PseudoStructure};

/// Structure constants: value\[i\]\[j\]\[k\] is the e_k coefficient of e_i e_j.
pub type Constants = Vec<Vec<Vec<Rat>>>;

/// An ordinary algebra over the rationals, validated on construction.
#[derive(Debug, Clone)]
pub struct BaseAlgebra {
    pub name: String,
    pub dim: usize,
    pub product: Option<Constants>,
    pub bracket: Option<Constants>,
}

fn shape_ok(c: &Constants, dim: usize) -> bool {
    c.len() == dim && c.iter().all(|r| r.len() == dim && r.iter().all(|v| v.len() == dim))
}

impl BaseAlgebra {
    /// A Lie algebra; antisymmetry and Jacobi are checked exhaustively.
    pub fn lie(name: &str, dim: usize, bracket: Constants) -> Result<Self> {
        let a = BaseAlgebra { name: name.to_string(), dim, product: None, bracket: Some(bracket) };
        a.validated()
    }

    /// A commutative associative algebra.
    pub fn commutative(name: &str, dim: usize, product: Constants) -> Result<Self> {
        let a = BaseAlgebra { name: name.to_string(), dim, product: Some(product), bracket: None };
        a.validated()
    }

    /// A commutative Poisson algebra: both tables, Leibniz included.
    pub fn poisson(name: &str, dim: usize, product: Constants, bracket: Constants) -> Result<Self> {
        let a = BaseAlgebra {
            name: name.to_string(),
            dim,
            product: Some(product),
            bracket: Some(bracket),
        };
        a.validated()
    }

    fn validated(self) -> Result<Self> {
        for (label, c) in [("product", &self.product), ("bracket", &self.bracket)] {
            if let Some(c) = c {
                if !shape_ok(c, self.dim) {
                    return Err(Error::InvalidTable(format!(
                        "{label} constants must be {0}x{0}x{0}",
                        self.dim
                    )));
                }
            }
        }
        let records = self.classical_records()?;
        let failing: Vec<&str> =
            records.iter().filter(|r| !r.passed()).map(|r| r.law.as_str()).collect();
        if !failing.is_empty() {
            return Err(Error::InvalidTable(format!(
                "declared laws fail for {}: {}",
                self.name,
                failing.join(", ")
            )));
        }
        Ok(self)
    }

    pub fn zero_vec(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.dim]
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Rat> {
        let mut v = self.zero_vec();
        v[i] = Rat::from_integer(1.into());
        v
    }

    fn apply_constants(&self, c: &Constants, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let mut out = self.zero_vec();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                for (k, ck) in c[i][j].iter().enumerate() {
                    if !ck.is_zero() {
                        out[k] += xi * yj * ck;
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
        let c = self
            .product
            .as_ref()
            .ok_or_else(|| Error::InvalidTable(format!("{} has no product", self.name)))?;
        Ok(self.apply_constants(c, x, y))
    }

    pub fn br(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
        let c = self
            .bracket
            .as_ref()
            .ok_or_else(|| Error::InvalidTable(format!("{} has no bracket", self.name)))?;
        Ok(self.apply_constants(c, x, y))
    }

    pub fn fmt_vec(&self, v: &[Rat]) -> String {
        let parts: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{} e{}", fmt_rat(c), i + 1))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// The ordinary law suite for whatever tables are present: commutativity
    /// and associativity of the product, antisymmetry and Jacobi of the
    /// bracket, and Leibniz when both exist.
    pub fn classical_records(&self) -> Result<Vec<LawRecord>> {
        let mut records = Vec::new();
        let n = self.dim;
        let vec_is_zero = |v: &[Rat]| v.iter().all(Rat::is_zero);
        let sub = |x: &[Rat], y: &[Rat]| -> Vec<Rat> {
            x.iter().zip(y).map(|(a, b)| a - b).collect()
        };
        let add = |x: &[Rat], y: &[Rat]| -> Vec<Rat> {
            x.iter().zip(y).map(|(a, b)| a + b).collect()
        };

        if self.product.is_some() {
            let mut comm = LawRun::new("classical-commutativity", &self.name);
            let mut assoc = LawRun::new("classical-associativity", &self.name);
            for i in 0..n {
                for j in 0..n {
                    let ij = self.mul(&self.basis_vec(i), &self.basis_vec(j))?;
                    let ji = self.mul(&self.basis_vec(j), &self.basis_vec(i))?;
                    let diff = sub(&ij, &ji);
                    comm.instance(
                        || format!("(e{}, e{})", i + 1, j + 1),
                        Ok((!vec_is_zero(&diff)).then(|| self.fmt_vec(&diff))),
                    )?;
                    for k in 0..n {
                        let lhs = self.mul(&ij, &self.basis_vec(k))?;
                        let jk = self.mul(&self.basis_vec(j), &self.basis_vec(k))?;
                        let rhs = self.mul(&self.basis_vec(i), &jk)?;
                        let diff = sub(&lhs, &rhs);
                        assoc.instance(
                            || format!("(e{}, e{}, e{})", i + 1, j + 1, k + 1),
                            Ok((!vec_is_zero(&diff)).then(|| self.fmt_vec(&diff))),
                        )?;
                    }
                }
            }
            records.push(comm.finish());
            records.push(assoc.finish());
        }

        if self.bracket.is_some() {
            let mut anti = LawRun::new("classical-antisymmetry", &self.name);
            let mut jac = LawRun::new("classical-jacobi", &self.name);
            for i in 0..n {
                for j in 0..n {
                    let ij = self.br(&self.basis_vec(i), &self.basis_vec(j))?;
                    let ji = self.br(&self.basis_vec(j), &self.basis_vec(i))?;
                    let diff = add(&ij, &ji);
                    anti.instance(
                        || format!("(e{}, e{})", i + 1, j + 1),
                        Ok((!vec_is_zero(&diff)).then(|| self.fmt_vec(&diff))),
                    )?;
                    for k in 0..n {
                        let jk = self.br(&self.basis_vec(j), &self.basis_vec(k))?;
                        let ik = self.br(&self.basis_vec(i), &self.basis_vec(k))?;
                        // {a,{b,c}} = {{a,b},c} + {b,{a,c}}.
                        let lhs = self.br(&self.basis_vec(i), &jk)?;
                        let t1 = self.br(&ij, &self.basis_vec(k))?;
                        let t2 = self.br(&self.basis_vec(j), &ik)?;
                        let diff = sub(&lhs, &add(&t1, &t2));
                        jac.instance(
                            || format!("(e{}, e{}, e{})", i + 1, j + 1, k + 1),
                            Ok((!vec_is_zero(&diff)).then(|| self.fmt_vec(&diff))),
                        )?;
                    }
                }
            }
            records.push(anti.finish());
            records.push(jac.finish());
        }

        if self.product.is_some() && self.bracket.is_some() {
            let mut leib = LawRun::new("classical-leibniz", &self.name);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let jk = self.mul(&self.basis_vec(j), &self.basis_vec(k))?;
                        let lhs = self.br(&self.basis_vec(i), &jk)?;
                        let ij = self.br(&self.basis_vec(i), &self.basis_vec(j))?;
                        let ik = self.br(&self.basis_vec(i), &self.basis_vec(k))?;
                        let t1 = self.mul(&ij, &self.basis_vec(k))?;
                        let t2 = self.mul(&self.basis_vec(j), &ik)?;
                        let diff = sub(&lhs, &add(&t1, &t2));
                        leib.instance(
                            || format!("(e{}, e{}, e{})", i + 1, j + 1, k + 1),
                            Ok((!vec_is_zero(&diff)).then(|| self.fmt_vec(&diff))),
                        )?;
                    }
                }
            }
            records.push(leib.finish());
        }

        Ok(records)
    }
}

/// The current Lie structure on the free module H (x) L.
pub fn build_current_lie(kernel: &Kernel, base: &BaseAlgebra) -> Result<PseudoStructure> {
    let constants = base
        .bracket
        .as_ref()
        .ok_or_else(|| Error::InvalidTable(format!("{} has no bracket", base.name)))?;
    let module = Module::free(kernel, base.dim);
    let mut entries = BTreeMap::new();
    for i in 0..base.dim {
        for j in 0..base.dim {
            let mut m = module.zero_elt();
            for (k, c) in constants[i][j].iter().enumerate() {
                if !c.is_zero() {
                    m = module.elt_add(&m, &module.elt_scale(&module.gen_elt(k), c));
                }
            }
            if module.elt_is_zero(&m) {
                continue;
            }
            let mut t = PolyTensor::zero(2);
            t.add_term(&module, vec![kernel.unit_mono(); 2], m);
            entries.insert((i, j), t);
        }
    }
    let mut s = PseudoStructure::new(&format!("Cur({})", base.name), module);
    s.bracket = Some(Bracket::new(entries));
    Ok(s)
}

/// The current Poisson structure: current bracket plus first-slot product.
pub fn build_current_poisson(kernel: &Kernel, base: &BaseAlgebra) -> Result<PseudoStructure> {
    let product = base
        .product
        .as_ref()
        .ok_or_else(|| Error::InvalidTable(format!("{} has no product", base.name)))?
        .clone();
    let mut s = build_current_lie(kernel, base)?;
    s.product = Some(Product::first_slot(product));
    Ok(s)
}
