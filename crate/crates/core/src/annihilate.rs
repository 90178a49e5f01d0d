//! Dual algebras of group kernels and the finite algebras they cut out.
//!
//! For a group kernel H = k[G], the dual X = H* has the basis of evaluation
//! functions d_g, pointwise product (the convolution dual to the coproduct),
//! unit = the counit, and the two kernel actions
//!
//! ```text
//! (h -> x)(l) = x(l h)        (x <- h)(l) = x(h l)
//! ```
//!
//! Tensoring a structure over H with X collapses it to an ordinary algebra:
//! X (x)_H L is the quotient of X (x) L by x <- h (x) a - x (x) h a, and the
//! bracket values Sum (f_i (x) g_i) (x)_H e_i become
//! Sum (x <- f_i)(y <- g_i) (x) e_i there. Evaluation happens on the chosen
//! quotient basis and extends bilinearly.

use num_traits::{One, Zero};

use crate::current::{BaseAlgebra, Constants};
use crate::error::{Error, Result};
use crate::hopf::{Kernel, Mono};
use crate::linalg::{SparseRref, SparseVec};
use crate::module::{MElt, Presentation};
use crate::scalar::Rat;
use crate::structure::{finitize_structure, PseudoStructure};

/// The dual of a group kernel on its evaluation basis.
#[derive(Debug, Clone)]
pub struct DualAlgebra {
    pub kernel: Kernel,
    /// Group elements in enumeration order; d_i evaluates to 1 on the i-th.
    pub elements: Vec<Mono>,
}

impl DualAlgebra {
    pub fn new(kernel: &Kernel) -> Result<Self> {
        let Kernel::Group { .. } = kernel else {
            return Err(Error::Unsupported(
                "the dual of a polynomial kernel is a completion, not modeled here".into(),
            ));
        };
        Ok(DualAlgebra { kernel: kernel.clone(), elements: kernel.basis(0) })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self, gamma: &Mono) -> usize {
        self.elements.iter().position(|m| m == gamma).expect("group element")
    }

    /// d_gamma <- h = d_{h^{-1} gamma}.
    pub fn right_act(&self, i: usize, h: &Mono) -> usize {
        let (hinv, _) = self.kernel.mono_antipode(h);
        self.index(&self.kernel.mono_mul(&hinv, &self.elements[i]))
    }

    /// h -> d_gamma = d_{gamma h^{-1}}.
    pub fn left_act(&self, h: &Mono, i: usize) -> usize {
        let (hinv, _) = self.kernel.mono_antipode(h);
        self.index(&self.kernel.mono_mul(&self.elements[i], &hinv))
    }

    /// Product by convolution against the coproduct:
    /// (x y)(h) = Sum x(h_(1)) y(h_(2)); grouplike legs make it pointwise.
    pub fn product(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        self.elements
            .iter()
            .map(|h| {
                let mut val = Rat::zero();
                for (legs, c) in self.kernel.mono_coproduct_legs(h, 2) {
                    val += c * &x[self.index(&legs[0])] * &y[self.index(&legs[1])];
                }
                val
            })
            .collect()
    }

    /// The counit as an element of the dual: constantly 1.
    pub fn unit(&self) -> Vec<Rat> {
        vec![Rat::one(); self.dim()]
    }
}

/// A finite quotient X (x)_H L with its transported structure.
#[derive(Debug)]
pub struct Annihilation {
    pub dual: DualAlgebra,
    /// The collapsed algebra on the quotient basis, laws validated.
    pub algebra: BaseAlgebra,
    /// Quotient basis positions as (dual index, module basis index).
    pub class_reps: Vec<(usize, usize)>,
    relations: SparseRref,
    ambient: usize,
    module_dim: usize,
}

impl Annihilation {
    fn tensor_index(&self, x: usize, a: usize) -> usize {
        x * self.module_dim + a
    }

    /// Quotient coordinates of the pure tensor d_x (x) v_a.
    pub fn class_of(&self, x: usize, a: usize) -> Vec<Rat> {
        let mut v = SparseVec::new();
        v.insert(self.tensor_index(x, a), Rat::one());
        self.relations.quotient_coords(&v, self.ambient)
    }
}


struct Collapse {
    dual: DualAlgebra,
    fin: PseudoStructure,
    group: Vec<Mono>,
    relations: SparseRref,
    ambient: usize,
    module_dim: usize,
    reps: Vec<(usize, usize)>,
}

/// Builds the quotient X (x) L / (x <- h (x) a - x (x) h a) and locates a
/// basis among the pure tensors.
fn collapse(s: &PseudoStructure) -> Result<Collapse> {
    let dual = DualAlgebra::new(&s.module.kernel)?;
    let (fin, group) = match s.module.presentation {
        Presentation::Free { .. } => finitize_structure(s)?,
        Presentation::FiniteDim { .. } => (s.clone(), dual.elements.clone()),
    };
    let module_dim = fin.module.gens();
    let ambient = dual.dim() * module_dim;
    let mut relations = SparseRref::new();
    for x in 0..dual.dim() {
        for h in &dual.elements {
            if *h == dual.kernel.unit_mono() {
                continue;
            }
            for a in 0..module_dim {
                let mut v = SparseVec::new();
                v.insert(dual.right_act(x, h) * module_dim + a, Rat::one());
                let ha = fin.module.act_mono(h, &fin.module.gen_elt(a));
                let MElt::Fin(coords) = ha else { panic!("finite module expected") };
                for (b, c) in coords.iter().enumerate() {
                    if !c.is_zero() {
                        let idx = x * module_dim + b;
                        let prev = v.remove(&idx).unwrap_or_else(Rat::zero);
                        let next = prev - c;
                        if !next.is_zero() {
                            v.insert(idx, next);
                        }
                    }
                }
                relations.insert(&v);
            }
        }
    }
    let reps = relations
        .free_indices(ambient)
        .into_iter()
        .map(|i| (i / module_dim, i % module_dim))
        .collect();
    Ok(Collapse { dual, fin, group, relations, ambient, module_dim, reps })
}

/// Bracket constants on the quotient basis from the tensor display.
fn bracket_constants(c: &Collapse) -> Result<Constants> {
    let n = c.reps.len();
    let br = c
        .fin
        .bracket
        .as_ref()
        .ok_or_else(|| Error::InvalidTable("structure has no bracket".into()))?;
    let mut constants = vec![vec![vec![Rat::zero(); n]; n]; n];
    for (p, &(x, a)) in c.reps.iter().enumerate() {
        for (q, &(y, b)) in c.reps.iter().enumerate() {
            let t = br.entry(&c.fin.module, a, b)?;
            let mut vec = SparseVec::new();
            for (tuple, m) in t.terms() {
                let xs = c.dual.right_act(x, &tuple[0]);
                let ys = c.dual.right_act(y, &tuple[1]);
                // Pointwise product of shifted evaluation functions.
                if xs != ys {
                    continue;
                }
                let MElt::Fin(coords) = m else { panic!("finite module expected") };
                for (e, w) in coords.iter().enumerate() {
                    if !w.is_zero() {
                        let idx = xs * c.module_dim + e;
                        let prev = vec.remove(&idx).unwrap_or_else(Rat::zero);
                        let next = prev + w;
                        if !next.is_zero() {
                            vec.insert(idx, next);
                        }
                    }
                }
            }
            constants[p][q] = c.relations.quotient_coords(&vec, c.ambient);
        }
    }
    Ok(constants)
}

/// Product constants: (x (x) a).(y (x) b) = x y (x) a.b on the basis.
///
/// First-slot products are only compatible with the kernel action on
/// unit-coefficient representatives, so a free basis tensor
/// d_x (x) (gamma e_i) is first rewritten as (d_x <- gamma) (x) e_i; the
/// product then happens between plain generators. Finite products carry no
/// coefficients to move.
fn product_constants(c: &Collapse, s: &PseudoStructure) -> Result<Constants> {
    let n = c.reps.len();
    let g = c.group.len();
    let free_input = matches!(s.module.presentation, Presentation::Free { .. });
    let fin_coords = |m: &MElt| match m {
        MElt::Fin(v) => v.clone(),
        MElt::Free(_) => panic!("expected finite coordinates"),
    };
    let mut constants = vec![vec![vec![Rat::zero(); n]; n]; n];
    for (p, &(x, a)) in c.reps.iter().enumerate() {
        for (q, &(y, b)) in c.reps.iter().enumerate() {
            let (xs, ys, ab) = if free_input {
                let (i, ja) = (a / g, a % g);
                let (j, jb) = (b / g, b % g);
                let xs = c.dual.right_act(x, &c.group[ja]);
                let ys = c.dual.right_act(y, &c.group[jb]);
                let prod = s.product_eval(&s.module.gen_elt(i), &s.module.gen_elt(j))?;
                (xs, ys, fin_coords(&s.module.elt_to_fin(&c.group, &prod)))
            } else {
                let prod = s.product_eval(&c.fin.module.gen_elt(a), &c.fin.module.gen_elt(b))?;
                (x, y, fin_coords(&prod))
            };
            if xs != ys {
                continue;
            }
            let mut vec = SparseVec::new();
            for (e, w) in ab.iter().enumerate() {
                if !w.is_zero() {
                    vec.insert(xs * c.module_dim + e, w.clone());
                }
            }
            constants[p][q] = c.relations.quotient_coords(&vec, c.ambient);
        }
    }
    Ok(constants)
}

/// The Lie algebra X (x)_H L of a bracket structure over a group kernel.
pub fn build_annihilation_lie(s: &PseudoStructure) -> Result<Annihilation> {
    let c = collapse(s)?;
    let constants = bracket_constants(&c)?;
    let algebra = BaseAlgebra::lie(&format!("Ann({})", s.name), c.reps.len(), constants)?;
    Ok(Annihilation {
        dual: c.dual,
        algebra,
        class_reps: c.reps,
        relations: c.relations,
        ambient: c.ambient,
        module_dim: c.module_dim,
    })
}

/// The Poisson algebra X (x)_H L of a commutative Poisson structure.
pub fn build_annihilation_poisson(s: &PseudoStructure) -> Result<Annihilation> {
    let c = collapse(s)?;
    let bracket = bracket_constants(&c)?;
    let product = product_constants(&c, s)?;
    let algebra =
        BaseAlgebra::poisson(&format!("Ann({})", s.name), c.reps.len(), product, bracket)?;
    Ok(Annihilation {
        dual: c.dual,
        algebra,
        class_reps: c.reps,
        relations: c.relations,
        ambient: c.ambient,
        module_dim: c.module_dim,
    })
}
