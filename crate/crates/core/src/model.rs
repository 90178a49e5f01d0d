//! Text model language: line-oriented sectioned definitions of a kernel,
//! modules, product/bracket tables, maps, gradings, and a task list, with a
//! canonical printer.
//!
//! Grammar, bit for bit:
//!
//! * `#` starts a comment running to the end of the line; blank lines are
//!   skipped.
//! * Sections open with `[hopf]`, `[module NAME]`, `[product NAME]`,
//!   `[bracket NAME]`, `[map NAME]`, `[grading NAME]`, or `[task]`.
//! * Ordinary entries are `key = value` lines.
//! * Product and bracket sections also take table rows
//!   `e_i * e_j -> <tensor-expr>`, where `<tensor-expr>` is `0` or a sum of
//!   `(h1, h2, ...)@(<element>)` terms: a parenthesized tuple of Hopf
//!   monomials and a module element.  Products use one slot, brackets two.
//! * Hopf monomials are `1`, `d1^2*d2`-style words over a polynomial
//!   kernel, or `g1*g2^3`-style words over a group kernel.
//! * Module elements are `0` or signed sums of `coeff e_k` pieces with
//!   rational coefficients `p/q`; over a free module a piece may carry a
//!   Hopf coefficient as `(mono)@(coeff e_k)`.
//!
//! `[hopf]` declares `kernel = polynomial(n)` or `kernel = group(m1, m2)`.
//! A `[module]` declares either `free = rank` or `dim = n` plus one
//! `act g1 = [1, 0; 0, -1]`-style matrix per kernel generator.  A
//! `[grading]` names its `module` and lists `degrees = [0, 1]` plus the
//! bracket shift `p`.  A `[product]` names its `module`, a `style` of
//! `table` or `first-slot`, and rows; omitted pairs are zero.  A `[map]`
//! names `source` and `target` modules and gives columns as `e_k = value`
//! lines; omitted columns are zero.  `[task]` lines read
//! `run = verb key=name ...`; the spans, maps, and structures a verb uses
//! are assembled from the named declarations.
//!
//! Parsing resolves every symbol reference and checks dimensions, so a
//! returned [`ModelFile`] is coherent; law checking belongs to the verbs.
//! Syntax errors carry the line and column plus the expected token, and
//! semantic errors name the offending symbol.  [`print_model`] renders the
//! canonical form: grouped sections, sorted rows, straightened tensors.
//! Printing a parsed file and re-parsing it is the identity, which is what
//! makes the canonical form canonical.

use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hopf::{fmt_mono_tuple, HopfElement, Kernel, Mono};
use crate::linalg::Mat;
use crate::module::{Grading, HMap, MElt, Module, Presentation};
use crate::polytensor::PolyTensor;
use crate::scalar::{fmt_rat, Rat};
use crate::structure::{Bracket, Product, ProductStyle};

/// A named module declaration.
#[derive(Debug, Clone)]
pub struct ModuleDecl {
    pub name: String,
    pub module: Module,
}

/// A named grading over a declared module.
#[derive(Debug, Clone)]
pub struct GradingDecl {
    pub name: String,
    pub module: String,
    pub grading: Grading,
}

/// A named product table over a declared module.
#[derive(Debug, Clone)]
pub struct ProductDecl {
    pub name: String,
    pub module: String,
    pub product: Product,
}

/// A named bracket table over a declared module.
#[derive(Debug, Clone)]
pub struct BracketDecl {
    pub name: String,
    pub module: String,
    pub bracket: Bracket,
}

/// A named map between declared modules, column by column.
#[derive(Debug, Clone)]
pub struct MapDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub map: HMap,
}

/// One `run = verb key=name ...` line.
#[derive(Debug, Clone)]
pub struct Task {
    pub verb: String,
    pub args: Vec<(String, String)>,
}

impl Task {
    pub fn arg(&self, key: &str) -> Option<&str> {
        self.args.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// A parsed, resolved definition document.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub kernel: Kernel,
    pub modules: Vec<ModuleDecl>,
    pub gradings: Vec<GradingDecl>,
    pub products: Vec<ProductDecl>,
    pub brackets: Vec<BracketDecl>,
    pub maps: Vec<MapDecl>,
    pub tasks: Vec<Task>,
}

impl ModelFile {
    pub fn module(&self, name: &str) -> Result<&ModuleDecl> {
        self.modules
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::Model(format!("no module named '{name}'")))
    }

    pub fn grading(&self, name: &str) -> Result<&GradingDecl> {
        self.gradings
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::Model(format!("no grading named '{name}'")))
    }

    pub fn product(&self, name: &str) -> Result<&ProductDecl> {
        self.products
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::Model(format!("no product named '{name}'")))
    }

    pub fn bracket(&self, name: &str) -> Result<&BracketDecl> {
        self.brackets
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::Model(format!("no bracket named '{name}'")))
    }

    pub fn map(&self, name: &str) -> Result<&MapDecl> {
        self.maps
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::Model(format!("no map named '{name}'")))
    }
}

/// Canonical form is the normal form: two files are equal exactly when they
/// print identically.
impl PartialEq for ModelFile {
    fn eq(&self, other: &Self) -> bool {
        print_model(self) == print_model(other)
    }
}

impl Eq for ModelFile {}

/// The verbs a task line may name, in dispatch order.
pub const VERBS: &[&str] = &[
    "check",
    "extend-ore",
    "current",
    "annihilate",
    "tensor",
    "quotient",
    "cohomology",
    "envelope",
    "verify-triple",
];

/// Argument keys a verb accepts, in canonical print order.
pub fn verb_keys(verb: &str) -> &'static [&'static str] {
    match verb {
        "check" => &["module", "product", "bracket", "grading", "differential", "commutative"],
        "extend-ore" => {
            &["module", "product", "bracket", "grading", "differential", "alpha", "delta"]
        }
        "current" => &["kind", "module", "product", "bracket"],
        "annihilate" => {
            &["kind", "current", "module", "product", "bracket", "grading", "differential"]
        }
        "tensor" => &[
            "module",
            "product",
            "bracket",
            "grading",
            "differential",
            "module2",
            "product2",
            "bracket2",
            "grading2",
            "differential2",
        ],
        "quotient" => &["module", "product", "bracket", "grading", "differential", "span"],
        "cohomology" => &[
            "module",
            "product",
            "bracket",
            "grading",
            "differential",
            "map",
            "module2",
            "product2",
            "bracket2",
            "grading2",
            "differential2",
        ],
        "envelope" => &["module", "product", "bracket", "grading", "differential"],
        "verify-triple" => &[
            "module",
            "product",
            "bracket",
            "grading",
            "differential",
            "f",
            "g",
            "module2",
            "product2",
            "bracket2",
            "grading2",
            "differential2",
        ],
        _ => &[],
    }
}

fn perr(line: usize, msg: String) -> Error {
    Error::Parse { line, msg }
}

/// Character cursor over one value span, tracking the column inside the
/// original line for error positions.
struct Cur<'a> {
    s: &'a str,
    pos: usize,
    line: usize,
    base: usize,
}

impl<'a> Cur<'a> {
    fn new(s: &'a str, line: usize, base: usize) -> Self {
        Cur { s, pos: 0, line, base }
    }

    fn err(&self, msg: &str) -> Error {
        perr(self.line, format!("column {}: {msg}", self.base + self.pos + 1))
    }

    fn ws(&mut self) {
        while self.s[self.pos..].starts_with(' ') || self.s[self.pos..].starts_with('\t') {
            self.pos += 1;
        }
    }

    fn eof(&mut self) -> bool {
        self.ws();
        self.pos >= self.s.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.s[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.ws();
        let start = self.pos;
        while self.s[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        Ok(&self.s[start..self.pos])
    }

    fn uint(&mut self) -> Result<u64> {
        let d = self.digits()?;
        d.parse().map_err(|_| self.err("number too large"))
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.peek() == Some('-');
        if neg {
            self.pos += 1;
        }
        let v = self.uint()? as i64;
        Ok(if neg { -v } else { v })
    }

    fn rat(&mut self) -> Result<Rat> {
        let n = self.int()?;
        if self.s[self.pos..].starts_with('/') {
            self.pos += 1;
            let d = self.uint()?;
            if d == 0 {
                return Err(self.err("zero denominator"));
            }
            Ok(Rat::new(n.into(), (d as i64).into()))
        } else {
            Ok(Rat::from_integer(n.into()))
        }
    }

    /// Generator reference `e_k`, returned as a zero-based index.
    fn gen(&mut self, gens: usize) -> Result<usize> {
        self.ws();
        if !self.s[self.pos..].starts_with('e') {
            return Err(self.err("expected a generator 'e<k>'"));
        }
        self.pos += 1;
        let k = self.uint()? as usize;
        if k == 0 || k > gens {
            return Err(self.err(&format!("generator e{k} is outside the {gens} declared")));
        }
        Ok(k - 1)
    }

    /// A Hopf monomial: `1`, or a `*`-joined word of `d<k>^e` / `g<k>^e`
    /// factors matching the kernel family.
    fn mono(&mut self, kernel: &Kernel) -> Result<Mono> {
        self.ws();
        let mut out = kernel.unit_mono();
        if self.s[self.pos..].starts_with('1') {
            self.pos += 1;
            return Ok(out);
        }
        let letter = match kernel {
            Kernel::Polynomial { .. } => 'd',
            Kernel::Group { .. } => 'g',
        };
        loop {
            self.ws();
            if !self.s[self.pos..].starts_with(letter) {
                return Err(self.err(&format!("expected a '{letter}<k>' kernel generator or '1'")));
            }
            self.pos += 1;
            let k = self.uint()? as usize;
            if k == 0 || k > kernel.gen_count() {
                return Err(self.err(&format!(
                    "kernel generator {letter}{k} is outside the {} declared",
                    kernel.gen_count()
                )));
            }
            let e = if self.s[self.pos..].starts_with('^') {
                self.pos += 1;
                self.uint()?
            } else {
                1
            };
            let reduced = match kernel {
                Kernel::Polynomial { .. } => out[k - 1] + e,
                Kernel::Group { orders } => (out[k - 1] + e) % orders[k - 1],
            };
            out[k - 1] = reduced;
            if self.s[self.pos..].starts_with('*') {
                self.pos += 1;
                continue;
            }
            return Ok(out);
        }
    }

    /// One signed piece of a module element: `coeff e_k` or
    /// `(mono)@(coeff e_k)`; the leading sign is handled by the caller.
    fn melt_piece(&mut self, module: &Module) -> Result<(Option<Mono>, Rat, usize)> {
        if self.peek() == Some('(') {
            self.eat('(')?;
            let m = self.mono(&module.kernel)?;
            self.eat(')')?;
            self.eat('@')?;
            self.eat('(')?;
            let c = if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '-') {
                self.rat()?
            } else {
                Rat::one()
            };
            let k = self.gen(module.gens())?;
            self.eat(')')?;
            return Ok((Some(m), c, k));
        }
        let c = if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '-') {
            self.rat()?
        } else {
            Rat::one()
        };
        let k = self.gen(module.gens())?;
        Ok((None, c, k))
    }

    /// A module element: `0` or a signed sum of pieces.  Stops at the first
    /// character that cannot continue the sum, leaving it to the caller.
    fn melt(&mut self, module: &Module) -> Result<MElt> {
        if self.peek() == Some('0') {
            self.pos += 1;
            return Ok(module.zero_elt());
        }
        let mut out = module.zero_elt();
        let mut sign = Rat::one();
        if self.peek() == Some('-') {
            self.pos += 1;
            sign = -Rat::one();
        }
        loop {
            let (mono, c, k) = self.melt_piece(module)?;
            let coeff = &sign * &c;
            let piece = match (&mut out, mono) {
                (MElt::Fin(v), None) => {
                    v[k] += coeff;
                    None
                }
                (MElt::Fin(_), Some(_)) => {
                    return Err(self.err(
                        "Hopf coefficients need a free module; this module is finite-dimensional",
                    ))
                }
                (MElt::Free(v), mono) => {
                    let m = mono.unwrap_or_else(|| module.kernel.unit_mono());
                    v[k].add_term(m, coeff);
                    None
                }
            };
            let _ = piece;
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    sign = Rat::one();
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -Rat::one();
                }
                _ => return Ok(out),
            }
        }
    }

    /// A tensor expression with a fixed slot count: `0` or a signed sum of
    /// `(m1, ..., mk)@(element)` terms, straightened.
    fn ptensor(&mut self, module: &Module, slots: usize) -> Result<PolyTensor> {
        if self.peek() == Some('0') {
            self.pos += 1;
            return Ok(PolyTensor::zero(slots));
        }
        let mut out = PolyTensor::zero(slots);
        let mut sign = Rat::one();
        if self.peek() == Some('-') {
            self.pos += 1;
            sign = -Rat::one();
        }
        loop {
            self.eat('(')?;
            let mut tuple = vec![self.mono(&module.kernel)?];
            while self.peek() == Some(',') {
                self.pos += 1;
                tuple.push(self.mono(&module.kernel)?);
            }
            self.eat(')')?;
            if tuple.len() != slots {
                return Err(self.err(&format!(
                    "expected {slots} Hopf slot(s), found {}",
                    tuple.len()
                )));
            }
            self.eat('@')?;
            self.eat('(')?;
            let m = self.melt(module)?;
            self.eat(')')?;
            out = out.add(module, &PolyTensor::from_term(module, tuple, module.elt_scale(&m, &sign)));
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    sign = Rat::one();
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -Rat::one();
                }
                _ => return Ok(out.straighten(module)),
            }
        }
    }

    /// A `[a, b; c, d]` matrix of rationals.
    fn matrix(&mut self) -> Result<Mat> {
        self.eat('[')?;
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        loop {
            let mut row = vec![self.rat()?];
            while self.peek() == Some(',') {
                self.pos += 1;
                row.push(self.rat()?);
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(self.err("matrix rows must have equal length"));
                }
            }
            rows.push(row);
            match self.peek() {
                Some(';') => {
                    self.pos += 1;
                }
                Some(']') => {
                    self.pos += 1;
                    return Ok(Mat::from_rows(rows));
                }
                _ => return Err(self.err("expected ';' or ']'")),
            }
        }
    }

    /// A `[0, 1, -2]` list of integers.
    fn int_list(&mut self) -> Result<Vec<i64>> {
        self.eat('[')?;
        let mut out = vec![self.int()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            out.push(self.int()?);
        }
        self.eat(']')?;
        Ok(out)
    }

    fn finish(&mut self) -> Result<()> {
        if self.eof() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SecKind {
    Hopf,
    Module,
    Product,
    Bracket,
    Map,
    Grading,
    Task,
}

struct KeyVal<'a> {
    key: &'a str,
    val: &'a str,
    vstart: usize,
    line: usize,
}

struct RawRow<'a> {
    i: usize,
    j: usize,
    rhs: &'a str,
    rstart: usize,
    line: usize,
}

struct RawSec<'a> {
    kind: SecKind,
    name: String,
    line: usize,
    keyvals: Vec<KeyVal<'a>>,
    rows: Vec<RawRow<'a>>,
}

fn parse_header(body: &str, line: usize) -> Result<(SecKind, String)> {
    let mut parts = body.split_whitespace();
    let kind = parts.next().unwrap_or("");
    let name = parts.next();
    if parts.next().is_some() {
        return Err(perr(line, "a section header takes at most one name".into()));
    }
    let (kind, named) = match kind {
        "hopf" => (SecKind::Hopf, false),
        "module" => (SecKind::Module, true),
        "product" => (SecKind::Product, true),
        "bracket" => (SecKind::Bracket, true),
        "map" => (SecKind::Map, true),
        "grading" => (SecKind::Grading, true),
        "task" => (SecKind::Task, false),
        other => {
            return Err(perr(
                line,
                format!("unknown section kind '{other}'; expected hopf, module, product, bracket, map, grading, or task"),
            ))
        }
    };
    match (named, name) {
        (true, Some(n)) => Ok((kind, n.to_string())),
        (true, None) => Err(perr(line, format!("section [{kind:?}] needs a name").to_lowercase())),
        (false, None) => Ok((kind, String::new())),
        (false, Some(_)) => Err(perr(line, "this section kind takes no name".into())),
    }
}

/// Splits the document into raw sections with positioned entries.
fn raw_sections(text: &str) -> Result<Vec<RawSec<'_>>> {
    let mut secs: Vec<RawSec> = Vec::new();
    for (no, full) in text.lines().enumerate() {
        let line = no + 1;
        let body = match full.find('#') {
            Some(k) => &full[..k],
            None => full,
        };
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(inner) = trimmed.strip_prefix('[') {
            let Some(inner) = inner.strip_suffix(']') else {
                return Err(perr(line, "expected ']' closing the section header".into()));
            };
            let (kind, name) = parse_header(inner, line)?;
            secs.push(RawSec { kind, name, line, keyvals: Vec::new(), rows: Vec::new() });
            continue;
        }
        let Some(sec) = secs.last_mut() else {
            return Err(perr(line, "expected a '[section]' header before entries".into()));
        };
        if let Some(arrow) = body.find("->") {
            let lhs = &body[..arrow];
            let mut cur = Cur::new(lhs, line, 0);
            let i = cur.gen(usize::MAX)?;
            cur.eat('*')?;
            let j = cur.gen(usize::MAX)?;
            cur.finish()?;
            let rstart = arrow + 2;
            sec.rows.push(RawRow { i, j, rhs: &body[rstart..], rstart, line });
            continue;
        }
        let Some(eq) = body.find('=') else {
            return Err(perr(
                line,
                "expected 'key = value' or a table row 'e_i * e_j -> ...'".into(),
            ));
        };
        let key = body[..eq].trim();
        if key.is_empty() {
            return Err(perr(line, "expected a key before '='".into()));
        }
        sec.keyvals.push(KeyVal { key, val: &body[eq + 1..], vstart: eq + 1, line });
    }
    Ok(secs)
}

/// Key lookup with duplicate and leftover detection.
struct Keys<'a, 'b> {
    items: &'b [KeyVal<'a>],
    used: Vec<bool>,
    section: String,
    line: usize,
}

impl<'a, 'b> Keys<'a, 'b> {
    fn new(sec: &'b RawSec<'a>, label: &str) -> Self {
        Keys {
            items: &sec.keyvals,
            used: vec![false; sec.keyvals.len()],
            section: label.to_string(),
            line: sec.line,
        }
    }

    fn get(&mut self, key: &str) -> Result<Option<&'b KeyVal<'a>>> {
        let mut found = None;
        for (n, kv) in self.items.iter().enumerate() {
            if kv.key == key {
                if found.is_some() {
                    return Err(perr(kv.line, format!("duplicate key '{key}'")));
                }
                self.used[n] = true;
                found = Some(kv);
            }
        }
        Ok(found)
    }

    fn require(&mut self, key: &str) -> Result<&'b KeyVal<'a>> {
        self.get(key)?.ok_or_else(|| {
            perr(self.line, format!("{} needs a '{key} = ...' entry", self.section))
        })
    }

    fn finish(&self) -> Result<()> {
        for (n, kv) in self.items.iter().enumerate() {
            if !self.used[n] {
                return Err(perr(kv.line, format!("unknown key '{}' in {}", kv.key, self.section)));
            }
        }
        Ok(())
    }
}

fn cur_of<'a>(kv: &KeyVal<'a>) -> Cur<'a> {
    Cur::new(kv.val, kv.line, kv.vstart)
}

fn parse_kernel(kv: &KeyVal) -> Result<Kernel> {
    let mut cur = cur_of(kv);
    cur.ws();
    let rest = &cur.s[cur.pos..];
    let kernel = if let Some(args) = rest.strip_prefix("polynomial") {
        let mut c = Cur::new(args, kv.line, kv.vstart + cur.pos + "polynomial".len());
        c.eat('(')?;
        let n = c.uint()? as usize;
        c.eat(')')?;
        c.finish()?;
        if n == 0 {
            return Err(perr(kv.line, "a polynomial kernel needs at least one variable".into()));
        }
        Kernel::Polynomial { vars: n }
    } else if let Some(args) = rest.strip_prefix("group") {
        let mut c = Cur::new(args, kv.line, kv.vstart + cur.pos + "group".len());
        c.eat('(')?;
        let mut orders = vec![c.uint()?];
        while c.peek() == Some(',') {
            c.pos += 1;
            orders.push(c.uint()?);
        }
        c.eat(')')?;
        c.finish()?;
        if orders.iter().any(|&m| m == 0) {
            return Err(perr(kv.line, "group factor orders must be positive".into()));
        }
        Kernel::Group { orders }
    } else {
        return Err(perr(
            kv.line,
            format!("column {}: expected 'polynomial(n)' or 'group(m1, ...)'", kv.vstart + cur.pos + 1),
        ));
    };
    Ok(kernel)
}

fn unique_name(seen: &mut BTreeSet<String>, kind: &str, name: &str, line: usize) -> Result<()> {
    if !seen.insert(format!("{kind}:{name}")) {
        return Err(perr(line, format!("duplicate {kind} '{name}'")));
    }
    Ok(())
}

fn parse_module(kernel: &Kernel, sec: &RawSec) -> Result<Module> {
    let mut keys = Keys::new(sec, &format!("module '{}'", sec.name));
    if !sec.rows.is_empty() {
        return Err(perr(sec.rows[0].line, "table rows belong in product or bracket sections".into()));
    }
    let free = keys.get("free")?;
    let dim = keys.get("dim")?;
    let module = match (free, dim) {
        (Some(_), Some(kv)) => {
            return Err(perr(kv.line, "a module is either 'free = rank' or 'dim = n', not both".into()))
        }
        (Some(kv), None) => {
            let mut c = cur_of(kv);
            let rank = c.uint()? as usize;
            c.finish()?;
            if rank == 0 {
                return Err(perr(kv.line, "a free module needs rank at least 1".into()));
            }
            Module::free(kernel, rank)
        }
        (None, Some(kv)) => {
            let mut c = cur_of(kv);
            let n = c.uint()? as usize;
            c.finish()?;
            if n == 0 {
                return Err(perr(kv.line, "a finite-dimensional module needs dimension at least 1".into()));
            }
            let mut action = Vec::new();
            for k in 0..kernel.gen_count() {
                let key = format!("act {}", kernel.gen_name(k));
                let kv = keys.require(&key)?;
                let mut c = cur_of(kv);
                let mat = c.matrix()?;
                c.finish()?;
                if mat.rows != n || mat.cols != n {
                    return Err(perr(
                        kv.line,
                        format!("action matrix must be {n}x{n}, found {}x{}", mat.rows, mat.cols),
                    ));
                }
                action.push(mat);
            }
            Module::finite(kernel, action)
                .map_err(|e| perr(sec.line, format!("module '{}': {e}", sec.name)))?
        }
        (None, None) => {
            return Err(perr(sec.line, format!("module '{}' needs 'free = rank' or 'dim = n'", sec.name)))
        }
    };
    keys.finish()?;
    Ok(module)
}

fn module_of<'f>(
    modules: &'f [ModuleDecl],
    kv: &KeyVal,
) -> Result<&'f ModuleDecl> {
    let name = kv.val.trim();
    modules
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| perr(kv.line, format!("unknown module '{name}'")))
}

fn parse_grading(modules: &[ModuleDecl], sec: &RawSec) -> Result<GradingDecl> {
    let mut keys = Keys::new(sec, &format!("grading '{}'", sec.name));
    if !sec.rows.is_empty() {
        return Err(perr(sec.rows[0].line, "table rows belong in product or bracket sections".into()));
    }
    let mdecl = module_of(modules, keys.require("module")?)?;
    let kv = keys.require("degrees")?;
    let mut c = cur_of(kv);
    let degrees = c.int_list()?;
    c.finish()?;
    if degrees.len() != mdecl.module.gens() {
        return Err(perr(
            kv.line,
            format!(
                "grading lists {} degrees but module '{}' has {} generators",
                degrees.len(),
                mdecl.name,
                mdecl.module.gens()
            ),
        ));
    }
    let p = match keys.get("p")? {
        Some(kv) => {
            let mut c = cur_of(kv);
            let p = c.int()?;
            c.finish()?;
            p
        }
        None => 0,
    };
    keys.finish()?;
    Ok(GradingDecl {
        name: sec.name.clone(),
        module: mdecl.name.clone(),
        grading: Grading { degrees, p },
    })
}

fn parse_product(modules: &[ModuleDecl], sec: &RawSec) -> Result<ProductDecl> {
    let mut keys = Keys::new(sec, &format!("product '{}'", sec.name));
    let mdecl = module_of(modules, keys.require("module")?)?;
    let module = &mdecl.module;
    let n = module.gens();
    let first_slot = match keys.get("style")? {
        None => false,
        Some(kv) => match kv.val.trim() {
            "table" => false,
            "first-slot" => true,
            other => {
                return Err(perr(kv.line, format!("unknown style '{other}'; expected table or first-slot")))
            }
        },
    };
    keys.finish()?;
    let mut entries: Vec<Vec<Option<MElt>>> = vec![vec![None; n]; n];
    for row in &sec.rows {
        if row.i >= n || row.j >= n {
            return Err(perr(
                row.line,
                format!("entry (e{}, e{}) is outside the {n} generators of module '{}'", row.i + 1, row.j + 1, mdecl.name),
            ));
        }
        if entries[row.i][row.j].is_some() {
            return Err(perr(row.line, format!("duplicate entry for e{} * e{}", row.i + 1, row.j + 1)));
        }
        let mut c = Cur::new(row.rhs, row.line, row.rstart);
        let t = c.ptensor(module, 1)?;
        c.finish()?;
        // A straightened one-slot tensor is a single unit-tuple term.
        let val = t
            .terms()
            .next()
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| module.zero_elt());
        entries[row.i][row.j] = Some(val);
    }
    let product = if first_slot {
        let mut sc = vec![vec![vec![Rat::zero(); n]; n]; n];
        for (i, r) in entries.iter().enumerate() {
            for (j, e) in r.iter().enumerate() {
                let Some(m) = e else { continue };
                let MElt::Free(v) = m else {
                    return Err(perr(sec.line, "first-slot products need a free module".into()));
                };
                for (k, h) in v.iter().enumerate() {
                    for (mono, c) in h.terms() {
                        if mono.iter().any(|&e| e != 0) {
                            return Err(perr(
                                sec.line,
                                format!("first-slot structure constants are rational; entry e{} * e{} carries a Hopf coefficient", i + 1, j + 1),
                            ));
                        }
                        sc[i][j][k] = c.clone();
                    }
                }
            }
        }
        Product::first_slot(sc)
    } else {
        let table: Vec<Vec<MElt>> = entries
            .into_iter()
            .map(|r| r.into_iter().map(|e| e.unwrap_or_else(|| module.zero_elt())).collect())
            .collect();
        Product::table(table)
    };
    product.validate(module).map_err(|e| perr(sec.line, format!("product '{}': {e}", sec.name)))?;
    Ok(ProductDecl { name: sec.name.clone(), module: mdecl.name.clone(), product })
}

fn parse_bracket(modules: &[ModuleDecl], sec: &RawSec) -> Result<BracketDecl> {
    let mut keys = Keys::new(sec, &format!("bracket '{}'", sec.name));
    let mdecl = module_of(modules, keys.require("module")?)?;
    let module = &mdecl.module;
    let n = module.gens();
    keys.finish()?;
    let mut entries: BTreeMap<(usize, usize), PolyTensor> = BTreeMap::new();
    for row in &sec.rows {
        if row.i >= n || row.j >= n {
            return Err(perr(
                row.line,
                format!("entry (e{}, e{}) is outside the {n} generators of module '{}'", row.i + 1, row.j + 1, mdecl.name),
            ));
        }
        if entries.contains_key(&(row.i, row.j)) {
            return Err(perr(row.line, format!("duplicate entry for e{} * e{}", row.i + 1, row.j + 1)));
        }
        let mut c = Cur::new(row.rhs, row.line, row.rstart);
        let t = c.ptensor(module, 2)?;
        c.finish()?;
        if !t.is_zero() {
            entries.insert((row.i, row.j), t);
        }
    }
    let bracket = Bracket::new(entries);
    bracket.validate(module).map_err(|e| perr(sec.line, format!("bracket '{}': {e}", sec.name)))?;
    Ok(BracketDecl { name: sec.name.clone(), module: mdecl.name.clone(), bracket })
}

fn parse_map(modules: &[ModuleDecl], sec: &RawSec) -> Result<MapDecl> {
    if !sec.rows.is_empty() {
        return Err(perr(sec.rows[0].line, "table rows belong in product or bracket sections".into()));
    }
    let mut keys = Keys::new(sec, &format!("map '{}'", sec.name));
    let source = module_of(modules, keys.require("source")?)?;
    let target = module_of(modules, keys.require("target")?)?;
    let mut columns = vec![target.module.zero_elt(); source.module.gens()];
    let mut seen = vec![false; source.module.gens()];
    for kv in sec.keyvals.iter() {
        if kv.key == "source" || kv.key == "target" {
            continue;
        }
        let mut kc = Cur::new(kv.key, kv.line, 0);
        let k = kc
            .gen(source.module.gens())
            .map_err(|_| perr(kv.line, format!("unknown key '{}' in map '{}'", kv.key, sec.name)))?;
        kc.finish()
            .map_err(|_| perr(kv.line, format!("unknown key '{}' in map '{}'", kv.key, sec.name)))?;
        if seen[k] {
            return Err(perr(kv.line, format!("duplicate column e{}", k + 1)));
        }
        seen[k] = true;
        let mut c = cur_of(kv);
        columns[k] = c.melt(&target.module)?;
        c.finish()?;
    }
    let map = HMap { columns };
    map.validate(&source.module, &target.module)
        .map_err(|e| perr(sec.line, format!("map '{}': {e}", sec.name)))?;
    Ok(MapDecl {
        name: sec.name.clone(),
        source: source.name.clone(),
        target: target.name.clone(),
        map,
    })
}

fn parse_task(kv: &KeyVal) -> Result<Task> {
    let mut toks = kv.val.split_whitespace();
    let Some(verb) = toks.next() else {
        return Err(perr(kv.line, "a task needs 'run = verb key=name ...'".into()));
    };
    if !VERBS.contains(&verb) {
        return Err(perr(
            kv.line,
            format!("unknown verb '{verb}'; expected one of {}", VERBS.join(", ")),
        ));
    }
    let allowed = verb_keys(verb);
    let mut args = Vec::new();
    for tok in toks {
        let Some((k, v)) = tok.split_once('=') else {
            return Err(perr(kv.line, format!("task argument '{tok}' is not 'key=name'")));
        };
        if !allowed.contains(&k) {
            return Err(perr(kv.line, format!("verb '{verb}' takes no key '{k}'")));
        }
        if args.iter().any(|(prev, _)| prev == k) {
            return Err(perr(kv.line, format!("duplicate task key '{k}'")));
        }
        if v.is_empty() {
            return Err(perr(kv.line, format!("task key '{k}' has an empty value")));
        }
        args.push((k.to_string(), v.to_string()));
    }
    Ok(Task { verb: verb.to_string(), args })
}

/// Reference checks for one task: names resolve, components sit over the
/// named module, maps run between the right modules.
fn resolve_task(file: &ModelFile, task: &Task, line: usize) -> Result<()> {
    let fail = |msg: String| perr(line, msg);
    let get = |key: &str| task.arg(key);
    let module_ref = |key: &str| -> Result<Option<&ModuleDecl>> {
        match get(key) {
            None => Ok(None),
            Some(name) => Ok(Some(
                file.modules
                    .iter()
                    .find(|d| d.name == name)
                    .ok_or_else(|| fail(format!("unknown module '{name}'")))?,
            )),
        }
    };
    let base = module_ref("module")?;
    if base.is_none() {
        return Err(fail(format!("verb '{}' needs module=...", task.verb)));
    }
    let second = module_ref("module2")?;
    let over = |key: &str, owner_key: &str, owner: Option<&ModuleDecl>| -> Result<()> {
        let Some(name) = get(key) else { return Ok(()) };
        let (found, of) = if key.starts_with("product") {
            (file.products.iter().find(|d| d.name == name).map(|d| d.module.clone()), "product")
        } else if key.starts_with("bracket") {
            (file.brackets.iter().find(|d| d.name == name).map(|d| d.module.clone()), "bracket")
        } else {
            (file.gradings.iter().find(|d| d.name == name).map(|d| d.module.clone()), "grading")
        };
        let Some(m) = found else { return Err(fail(format!("unknown {of} '{name}'"))) };
        let Some(owner) = owner else {
            return Err(fail(format!("key '{key}' needs '{owner_key}=...'")));
        };
        if m != owner.name {
            return Err(fail(format!(
                "{of} '{name}' is over module '{m}', not '{}'",
                owner.name
            )));
        }
        Ok(())
    };
    over("product", "module", base)?;
    over("bracket", "module", base)?;
    over("grading", "module", base)?;
    over("product2", "module2", second)?;
    over("bracket2", "module2", second)?;
    over("grading2", "module2", second)?;
    let map_ref = |key: &str, src: Option<&ModuleDecl>, tgt: Option<&ModuleDecl>| -> Result<()> {
        let Some(name) = get(key) else { return Ok(()) };
        let decl = file
            .maps
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| fail(format!("unknown map '{name}'")))?;
        if let Some(src) = src {
            if decl.source != src.name {
                return Err(fail(format!(
                    "map '{name}' has source '{}', but key '{key}' needs source '{}'",
                    decl.source, src.name
                )));
            }
        }
        if let Some(tgt) = tgt {
            if decl.target != tgt.name {
                return Err(fail(format!(
                    "map '{name}' has target '{}', but key '{key}' needs target '{}'",
                    decl.target, tgt.name
                )));
            }
        }
        Ok(())
    };
    map_ref("differential", base, base)?;
    map_ref("differential2", second, second)?;
    map_ref("alpha", base, base)?;
    map_ref("delta", base, base)?;
    map_ref("span", None, base)?;
    map_ref("map", base, second)?;
    map_ref("f", base, second.or(base))?;
    map_ref("g", base, second.or(base))?;
    for key in ["kind"] {
        if let Some(v) = get(key) {
            if v != "lie" && v != "poisson" {
                return Err(fail(format!("key '{key}' takes lie or poisson, not '{v}'")));
            }
        }
    }
    for key in ["commutative", "current"] {
        if let Some(v) = get(key) {
            if v != "yes" && v != "no" {
                return Err(fail(format!("key '{key}' takes yes or no, not '{v}'")));
            }
        }
    }
    match task.verb.as_str() {
        "extend-ore" => {
            for key in ["alpha", "delta"] {
                if get(key).is_none() {
                    return Err(fail(format!("extend-ore needs {key}=...")));
                }
            }
        }
        "current" | "annihilate" => {
            if get("kind").is_none() {
                return Err(fail(format!("{} needs kind=lie or kind=poisson", task.verb)));
            }
        }
        "tensor" => {
            if second.is_none() {
                return Err(fail("tensor needs module2=...".into()));
            }
        }
        "quotient" => {
            if get("span").is_none() {
                return Err(fail("quotient needs span=...".into()));
            }
        }
        "cohomology" => {
            if get("map").is_some() && second.is_none() {
                return Err(fail("an invariance check needs module2=... alongside map=...".into()));
            }
        }
        "verify-triple" => {
            let explicit = second.is_some();
            if explicit != (get("f").is_some() && get("g").is_some()) {
                return Err(fail(
                    "verify-triple takes either no target (the letter triple of the envelope) or all of module2=, f=, g=".into(),
                ));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Parses a definition document into a resolved [`ModelFile`].
pub fn parse_model(text: &str) -> Result<ModelFile> {
    let secs = raw_sections(text)?;
    let mut hopf: Option<(&RawSec, Kernel)> = None;
    for sec in &secs {
        if sec.kind == SecKind::Hopf {
            if hopf.is_some() {
                return Err(perr(sec.line, "duplicate [hopf] section".into()));
            }
            let mut keys = Keys::new(sec, "[hopf]");
            let kv = keys.require("kernel")?;
            let kernel = parse_kernel(kv)?;
            keys.finish()?;
            if !sec.rows.is_empty() {
                return Err(perr(sec.rows[0].line, "table rows belong in product or bracket sections".into()));
            }
            hopf = Some((sec, kernel));
        }
    }
    let Some((_, kernel)) = hopf else {
        return Err(perr(1, "the file needs a [hopf] section declaring the kernel".into()));
    };

    let mut seen = BTreeSet::new();
    let mut modules = Vec::new();
    for sec in &secs {
        if sec.kind == SecKind::Module {
            unique_name(&mut seen, "module", &sec.name, sec.line)?;
            modules.push(ModuleDecl { name: sec.name.clone(), module: parse_module(&kernel, sec)? });
        }
    }

    let mut file = ModelFile {
        kernel,
        modules,
        gradings: Vec::new(),
        products: Vec::new(),
        brackets: Vec::new(),
        maps: Vec::new(),
        tasks: Vec::new(),
    };
    let mut task_lines = Vec::new();
    for sec in &secs {
        match sec.kind {
            SecKind::Hopf | SecKind::Module => {}
            SecKind::Grading => {
                unique_name(&mut seen, "grading", &sec.name, sec.line)?;
                file.gradings.push(parse_grading(&file.modules, sec)?);
            }
            SecKind::Product => {
                unique_name(&mut seen, "product", &sec.name, sec.line)?;
                file.products.push(parse_product(&file.modules, sec)?);
            }
            SecKind::Bracket => {
                unique_name(&mut seen, "bracket", &sec.name, sec.line)?;
                file.brackets.push(parse_bracket(&file.modules, sec)?);
            }
            SecKind::Map => {
                unique_name(&mut seen, "map", &sec.name, sec.line)?;
                file.maps.push(parse_map(&file.modules, sec)?);
            }
            SecKind::Task => {
                if !sec.rows.is_empty() {
                    return Err(perr(sec.rows[0].line, "table rows belong in product or bracket sections".into()));
                }
                for kv in &sec.keyvals {
                    if kv.key != "run" {
                        return Err(perr(kv.line, format!("unknown key '{}' in [task]; tasks are 'run = ...' lines", kv.key)));
                    }
                    file.tasks.push(parse_task(kv)?);
                    task_lines.push(kv.line);
                }
            }
        }
    }
    for (task, &line) in file.tasks.iter().zip(&task_lines) {
        resolve_task(&file, task, line)?;
    }
    Ok(file)
}

fn fmt_kernel(kernel: &Kernel) -> String {
    match kernel {
        Kernel::Polynomial { vars } => format!("polynomial({vars})"),
        Kernel::Group { orders } => {
            let inner: Vec<String> = orders.iter().map(|m| m.to_string()).collect();
            format!("group({})", inner.join(", "))
        }
    }
}

fn fmt_matrix(m: &Mat) -> String {
    let rows: Vec<String> = (0..m.rows)
        .map(|r| {
            let entries: Vec<String> = m.row(r).iter().map(fmt_rat).collect();
            entries.join(", ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

/// Structure constants of one first-slot pair as a printable element.
fn first_slot_elt(module: &Module, v: &[Rat]) -> MElt {
    let mut out = module.zero_elt();
    let MElt::Free(coords) = &mut out else { unreachable!("first-slot products are free") };
    for (k, c) in v.iter().enumerate() {
        if !c.is_zero() {
            coords[k] = HopfElement::from_term(&module.kernel, module.kernel.unit_mono(), c.clone());
        }
    }
    out
}

/// Renders the canonical text form: grouped sections, fixed key order,
/// ascending table rows, straightened tensor entries.
pub fn print_model(file: &ModelFile) -> String {
    let mut blocks: Vec<String> = Vec::new();
    blocks.push(format!("[hopf]\nkernel = {}\n", fmt_kernel(&file.kernel)));
    for d in &file.modules {
        let mut b = format!("[module {}]\n", d.name);
        match &d.module.presentation {
            Presentation::Free { rank } => b.push_str(&format!("free = {rank}\n")),
            Presentation::FiniteDim { dim, action } => {
                b.push_str(&format!("dim = {dim}\n"));
                for (k, mat) in action.iter().enumerate() {
                    b.push_str(&format!("act {} = {}\n", file.kernel.gen_name(k), fmt_matrix(mat)));
                }
            }
        }
        blocks.push(b);
    }
    for d in &file.gradings {
        let degrees: Vec<String> = d.grading.degrees.iter().map(|x| x.to_string()).collect();
        blocks.push(format!(
            "[grading {}]\nmodule = {}\ndegrees = [{}]\np = {}\n",
            d.name,
            d.module,
            degrees.join(", "),
            d.grading.p
        ));
    }
    for d in &file.products {
        let module = &file.module(&d.module).expect("resolved").module;
        let mut b = format!("[product {}]\nmodule = {}\n", d.name, d.module);
        match &d.product.style {
            ProductStyle::Table { table } => {
                b.push_str("style = table\n");
                for (i, row) in table.iter().enumerate() {
                    for (j, m) in row.iter().enumerate() {
                        if module.elt_is_zero(m) {
                            continue;
                        }
                        b.push_str(&format!("e{} * e{} -> (1)@({})\n", i + 1, j + 1, module.fmt_elt(m)));
                    }
                }
            }
            ProductStyle::FirstSlot { sc } => {
                b.push_str("style = first-slot\n");
                for (i, row) in sc.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        if v.iter().all(Rat::is_zero) {
                            continue;
                        }
                        let m = first_slot_elt(module, v);
                        b.push_str(&format!("e{} * e{} -> (1)@({})\n", i + 1, j + 1, module.fmt_elt(&m)));
                    }
                }
            }
        }
        blocks.push(b);
    }
    for d in &file.brackets {
        let module = &file.module(&d.module).expect("resolved").module;
        let mut b = format!("[bracket {}]\nmodule = {}\n", d.name, d.module);
        for (&(i, j), t) in &d.bracket.entries {
            let t = t.straighten(module);
            if t.is_zero() {
                continue;
            }
            b.push_str(&format!("e{} * e{} -> {}\n", i + 1, j + 1, t.fmt(module)));
        }
        blocks.push(b);
    }
    for d in &file.maps {
        let target = &file.module(&d.target).expect("resolved").module;
        let mut b = format!("[map {}]\nsource = {}\ntarget = {}\n", d.name, d.source, d.target);
        for (k, col) in d.map.columns.iter().enumerate() {
            if target.elt_is_zero(col) {
                continue;
            }
            b.push_str(&format!("e{} = {}\n", k + 1, target.fmt_elt(col)));
        }
        blocks.push(b);
    }
    if !file.tasks.is_empty() {
        let mut b = String::from("[task]\n");
        for t in &file.tasks {
            let mut line = format!("run = {}", t.verb);
            for key in verb_keys(&t.verb) {
                if let Some(v) = t.arg(key) {
                    line.push_str(&format!(" {key}={v}"));
                }
            }
            b.push_str(&line);
            b.push('\n');
        }
        blocks.push(b);
    }
    blocks.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratq;

    const LINE: &str = "\
[hopf]
kernel = group(2)

[module A]
dim = 2
act g1 = [0, 1; 1, 0]

[grading gA]
module = A
degrees = [0, 0]
p = 0

[product P]
module = A
style = table
e1 * e1 -> (1)@(e1)
e1 * e2 -> (1)@(e2)
e2 * e1 -> (1)@(e2)
e2 * e2 -> (1)@(e1)

[map z]
source = A
target = A

[task]
run = check module=A product=P grading=gA differential=z commutative=yes
";

    #[test]
    fn minimal_polynomial_file_parses() {
        let f = parse_model("[hopf]\nkernel = polynomial(1)\n\n[module A]\nfree = 1\n").unwrap();
        assert!(matches!(f.kernel, Kernel::Polynomial { vars: 1 }));
        assert_eq!(f.modules.len(), 1);
        assert!(f.modules[0].module.is_free());
        assert!(f.tasks.is_empty());
    }

    #[test]
    fn canonical_file_round_trips() {
        let f = parse_model(LINE).unwrap();
        let printed = print_model(&f);
        assert_eq!(printed, LINE);
        let g = parse_model(&printed).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn print_normalizes_row_order_and_spacing() {
        let shuffled = "\
[hopf]
kernel=group(2)
[module A]
dim=2
act g1=[0,1;1,0]
[product P]
module=A
e2 * e2 -> (1)@(e1)
e1 * e1 -> (1)@(e1)
";
        let f = parse_model(shuffled).unwrap();
        let printed = print_model(&f);
        let i1 = printed.find("e1 * e1").unwrap();
        let i2 = printed.find("e2 * e2").unwrap();
        assert!(i1 < i2);
        assert_eq!(parse_model(&printed).unwrap(), f);
    }

    #[test]
    fn undeclared_generator_in_bracket_is_named() {
        let text = "\
[hopf]
kernel = group(2)

[module A]
dim = 2
act g1 = [1, 0; 0, 1]

[bracket B]
module = A
e1 * e3 -> (1, 1)@(e1)
";
        let err = parse_model(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("e3"), "{msg}");
        assert!(msg.contains("line 9"), "{msg}");
    }

    #[test]
    fn syntax_error_carries_position_and_expectation() {
        let err = parse_model("[hopf]\nkernel = polynomial(x)\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("expected a number"), "{msg}");

        let err = parse_model("[hopf]\nkernel = group(2)\n\n[module A]\ndim = 1\nact g1 = [1\n")
            .unwrap_err();
        assert!(err.to_string().contains("expected ';' or ']'"), "{err}");
    }

    #[test]
    fn free_module_maps_carry_hopf_coefficients() {
        let text = "\
[hopf]
kernel = polynomial(1)

[module A]
free = 2

[map f]
source = A
target = A
e1 = (d1^2)@(2 e2) - e1
";
        let f = parse_model(text).unwrap();
        let col = &f.maps[0].map.columns[0];
        let MElt::Free(v) = col else { panic!("free column") };
        assert_eq!(v[0].coeff(&vec![0]), -Rat::one());
        assert_eq!(v[1].coeff(&vec![2]), ratq(2, 1));
        let printed = print_model(&f);
        assert!(printed.contains("e1 = -e1 + (d1^2)@(2 e2)"), "{printed}");
        assert_eq!(parse_model(&printed).unwrap(), f);
    }

    #[test]
    fn group_exponents_reduce_modulo_order() {
        let text = "\
[hopf]
kernel = group(2)

[module A]
free = 1

[bracket B]
module = A
e1 * e1 -> (g1^3, 1)@(e1)
";
        let f = parse_model(text).unwrap();
        let printed = print_model(&f);
        assert!(printed.contains("(g1, 1)@(e1)"), "{printed}");
    }

    #[test]
    fn bracket_rows_straighten_on_parse() {
        let text = "\
[hopf]
kernel = group(2)

[module A]
dim = 2
act g1 = [0, 1; 1, 0]

[bracket B]
module = A
e1 * e2 -> (1, g1)@(e1)
";
        let f = parse_model(text).unwrap();
        let entry = &f.brackets[0].bracket.entries[&(0, 1)];
        for (tuple, _) in entry.terms() {
            assert_eq!(tuple[1], vec![0]);
        }
    }

    #[test]
    fn task_reference_errors_name_the_symbol() {
        let text = format!("{}\n[task]\nrun = check module=B\n", "[hopf]\nkernel = group(2)\n\n[module A]\nfree = 1\n");
        let err = parse_model(&text).unwrap_err();
        assert!(err.to_string().contains("unknown module 'B'"), "{err}");

        let text = "\
[hopf]
kernel = group(2)

[module A]
free = 1

[module B]
free = 1

[product P]
module = B
style = first-slot
e1 * e1 -> (1)@(e1)

[task]
run = check module=A product=P
";
        let err = parse_model(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("over module 'B'"), "{msg}");
    }

    #[test]
    fn verify_triple_arity_is_enforced() {
        let base = "\
[hopf]
kernel = group(2)

[module A]
free = 1

[map f]
source = A
target = A
e1 = e1
";
        let err = parse_model(&format!("{base}\n[task]\nrun = verify-triple module=A f=f\n"))
            .unwrap_err();
        assert!(err.to_string().contains("verify-triple"), "{err}");
    }
}
