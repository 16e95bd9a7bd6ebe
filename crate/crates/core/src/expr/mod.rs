//! Expression DSL for complex functions of `ξ` and `ξ̄`.
//!
//! Expressions are stored as a topologically ordered arena: every node's
//! children have smaller indices, and the root is the last node. Shared
//! subexpressions are shared nodes, so builders can produce compact DAGs.
//! Evaluation is a single forward sweep.

mod calculus;
mod parser;

use std::fmt;

use num_complex::Complex64 as Complex;
use thiserror::Error;

use crate::jet::Jet1;

pub use calculus::{finite_diff_residual, Wirtinger};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("division by zero at node {node}")]
    DivisionByZero { node: usize },
}

/// Index of a node inside an [`Expr`] or [`ExprBuilder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Var,
    Conj(usize),
    Const(Complex),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
    IntPow(usize, i32),
    Exp(usize),
}

impl Node {
    fn remap(self, map: impl Fn(usize) -> usize) -> Self {
        match self {
            Node::Var | Node::Const(_) => self,
            Node::Conj(a) => Node::Conj(map(a)),
            Node::Neg(a) => Node::Neg(map(a)),
            Node::Exp(a) => Node::Exp(map(a)),
            Node::IntPow(a, n) => Node::IntPow(map(a), n),
            Node::Add(a, b) => Node::Add(map(a), map(b)),
            Node::Sub(a, b) => Node::Sub(map(a), map(b)),
            Node::Mul(a, b) => Node::Mul(map(a), map(b)),
            Node::Div(a, b) => Node::Div(map(a), map(b)),
        }
    }

    fn children(&self) -> [Option<usize>; 2] {
        match *self {
            Node::Var | Node::Const(_) => [None, None],
            Node::Conj(a) | Node::Neg(a) | Node::Exp(a) | Node::IntPow(a, _) => [Some(a), None],
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                [Some(a), Some(b)]
            }
        }
    }
}

/// An immutable expression in the single variable `ξ` (and its conjugate).
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    nodes: Vec<Node>,
}

impl Expr {
    /// Parses the textual DSL, e.g. `"conj(xi)*xi + 0.5i"`.
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        parser::parse(text)
    }

    pub fn var() -> Self {
        Self { nodes: vec![Node::Var] }
    }

    pub fn constant(c: Complex) -> Self {
        Self { nodes: vec![Node::Const(c)] }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        self.nodes.last().expect("expression arena is never empty")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when no `conj` node is reachable, i.e. the expression is
    /// holomorphic in `ξ` by construction.
    pub fn is_holomorphic(&self) -> bool {
        !self.nodes.iter().any(|n| matches!(n, Node::Conj(_)))
    }

    /// Value, `∂` and `∂̄` at `xi`, with `ξ` seeded as the identity.
    pub fn eval_jet(&self, xi: Complex) -> Result<Jet1, ExprError> {
        self.eval_jet_with(Jet1::variable(xi))
    }

    /// Evaluates with an arbitrary jet substituted for `ξ` (chain rule).
    pub fn eval_jet_with(&self, seed: Jet1) -> Result<Jet1, ExprError> {
        let mut vals: Vec<Jet1> = Vec::with_capacity(self.nodes.len());
        for (id, node) in self.nodes.iter().enumerate() {
            let v = match *node {
                Node::Var => seed,
                Node::Const(c) => Jet1::constant(c),
                Node::Conj(a) => vals[a].conj(),
                Node::Neg(a) => -vals[a],
                Node::Exp(a) => vals[a].exp(),
                Node::IntPow(a, n) => {
                    if n < 0 && vals[a].value.norm_sqr() == 0.0 {
                        return Err(ExprError::DivisionByZero { node: id });
                    }
                    vals[a].powi(n)
                }
                Node::Add(a, b) => vals[a] + vals[b],
                Node::Sub(a, b) => vals[a] - vals[b],
                Node::Mul(a, b) => vals[a] * vals[b],
                Node::Div(a, b) => {
                    if vals[b].value.norm_sqr() == 0.0 {
                        return Err(ExprError::DivisionByZero { node: id });
                    }
                    vals[a] / vals[b]
                }
            };
            vals.push(v);
        }
        Ok(*vals.last().expect("non-empty"))
    }

    /// Value only; cheaper than [`Expr::eval_jet`].
    pub fn eval(&self, xi: Complex) -> Result<Complex, ExprError> {
        let mut vals: Vec<Complex> = Vec::with_capacity(self.nodes.len());
        for (id, node) in self.nodes.iter().enumerate() {
            let v = match *node {
                Node::Var => xi,
                Node::Const(c) => c,
                Node::Conj(a) => vals[a].conj(),
                Node::Neg(a) => -vals[a],
                Node::Exp(a) => vals[a].exp(),
                Node::IntPow(a, n) => {
                    if n < 0 && vals[a].norm_sqr() == 0.0 {
                        return Err(ExprError::DivisionByZero { node: id });
                    }
                    vals[a].powi(n)
                }
                Node::Add(a, b) => vals[a] + vals[b],
                Node::Sub(a, b) => vals[a] - vals[b],
                Node::Mul(a, b) => vals[a] * vals[b],
                Node::Div(a, b) => {
                    if vals[b].norm_sqr() == 0.0 {
                        return Err(ExprError::DivisionByZero { node: id });
                    }
                    vals[a] / vals[b]
                }
            };
            vals.push(v);
        }
        Ok(*vals.last().expect("non-empty"))
    }

    /// Replaces `ξ` by `replacement`: the result is `self(replacement(ν))`.
    pub fn substitute(&self, replacement: &Expr) -> Expr {
        let mut b = ExprBuilder::new();
        let inner = b.import(replacement);
        let root = b.import_with(self, inner);
        b.finish(root)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_node(nodes: &[Node], id: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match nodes[id] {
                Node::Var => write!(f, "xi"),
                Node::Const(c) => write_const(c, f),
                Node::Conj(a) => {
                    write!(f, "conj(")?;
                    write_node(nodes, a, f)?;
                    write!(f, ")")
                }
                Node::Exp(a) => {
                    write!(f, "exp(")?;
                    write_node(nodes, a, f)?;
                    write!(f, ")")
                }
                Node::Neg(a) => {
                    write!(f, "(-")?;
                    write_node(nodes, a, f)?;
                    write!(f, ")")
                }
                Node::IntPow(a, n) => {
                    if n < 0 {
                        write!(f, "(1/(")?;
                        write_node(nodes, a, f)?;
                        write!(f, ")^{})", -n)
                    } else {
                        write!(f, "(")?;
                        write_node(nodes, a, f)?;
                        write!(f, ")^{n}")
                    }
                }
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    let op = match nodes[id] {
                        Node::Add(..) => '+',
                        Node::Sub(..) => '-',
                        Node::Mul(..) => '*',
                        _ => '/',
                    };
                    write!(f, "(")?;
                    write_node(nodes, a, f)?;
                    write!(f, "{op}")?;
                    write_node(nodes, b, f)?;
                    write!(f, ")")
                }
            }
        }
        fn write_const(c: Complex, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match (c.re, c.im) {
                (re, im) if im == 0.0 && re >= 0.0 => write!(f, "{re}"),
                (re, im) if im == 0.0 => write!(f, "(-{})", -re),
                (re, im) if re == 0.0 && im >= 0.0 => write!(f, "{im}i"),
                (re, im) if re == 0.0 => write!(f, "(-{}i)", -im),
                (re, im) => {
                    let sign = if im < 0.0 { '-' } else { '+' };
                    let re_txt = if re < 0.0 { format!("-{}", -re) } else { format!("{re}") };
                    write!(f, "({re_txt}{sign}{}i)", im.abs())
                }
            }
        }
        write_node(&self.nodes, self.nodes.len() - 1, f)
    }
}

/// Incremental construction of expression DAGs.
///
/// ```
/// use clab::expr::ExprBuilder;
/// let mut b = ExprBuilder::new();
/// let x = b.var();
/// let xc = b.conj(x);
/// let m = b.mul(x, xc);
/// let e = b.finish(m);
/// assert_eq!(e.to_string(), "(xi*conj(xi))");
/// ```
#[derive(Debug, Default, Clone)]
pub struct ExprBuilder {
    nodes: Vec<Node>,
    var: Option<usize>,
}

impl ExprBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        NodeId(self.nodes.len() - 1)
    }

    pub fn var(&mut self) -> NodeId {
        match self.var {
            Some(id) => NodeId(id),
            None => {
                let id = self.push(Node::Var);
                self.var = Some(id.0);
                id
            }
        }
    }

    pub fn constant(&mut self, c: Complex) -> NodeId {
        self.push(Node::Const(c))
    }

    pub fn real(&mut self, x: f64) -> NodeId {
        self.constant(Complex::new(x, 0.0))
    }

    pub fn conj(&mut self, a: NodeId) -> NodeId {
        self.push(Node::Conj(a.0))
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.push(Node::Neg(a.0))
    }

    pub fn exp(&mut self, a: NodeId) -> NodeId {
        self.push(Node::Exp(a.0))
    }

    pub fn powi(&mut self, a: NodeId, n: i32) -> NodeId {
        self.push(Node::IntPow(a.0, n))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Add(a.0, b.0))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Sub(a.0, b.0))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Mul(a.0, b.0))
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Div(a.0, b.0))
    }

    /// `k·a` for a constant `k`.
    pub fn scale(&mut self, k: Complex, a: NodeId) -> NodeId {
        let kc = self.constant(k);
        self.mul(kc, a)
    }

    /// Sum of a list of terms; an empty list is the constant zero.
    pub fn sum(&mut self, terms: &[NodeId]) -> NodeId {
        match terms.split_first() {
            None => self.real(0.0),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &t| self.add(acc, t)),
        }
    }

    /// Copies `e` into this builder, sharing this builder's `ξ`.
    pub fn import(&mut self, e: &Expr) -> NodeId {
        let var = self.var();
        self.import_with(e, var)
    }

    /// Copies `e` into this builder with `ξ` replaced by the node `var`.
    pub fn import_with(&mut self, e: &Expr, var: NodeId) -> NodeId {
        let map = self.import_map(e, var);
        NodeId(*map.last().expect("non-empty"))
    }

    /// Like [`ExprBuilder::import_with`], returning where every node of `e` landed.
    pub(crate) fn import_map(&mut self, e: &Expr, var: NodeId) -> Vec<usize> {
        let mut map = Vec::with_capacity(e.nodes.len());
        for node in &e.nodes {
            let id = match node {
                Node::Var => var.0,
                other => {
                    let remapped = other.remap(|i| map[i]);
                    self.nodes.push(remapped);
                    self.nodes.len() - 1
                }
            };
            map.push(id);
        }
        map
    }

    /// Extracts the sub-DAG reachable from `root` as a standalone expression.
    pub fn finish(self, root: NodeId) -> Expr {
        let mut reachable = vec![false; root.0 + 1];
        reachable[root.0] = true;
        for id in (0..=root.0).rev() {
            if reachable[id] {
                for c in self.nodes[id].children().into_iter().flatten() {
                    reachable[c] = true;
                }
            }
        }
        let mut map = vec![usize::MAX; root.0 + 1];
        let mut nodes = Vec::new();
        for id in 0..=root.0 {
            if reachable[id] {
                nodes.push(self.nodes[id].remap(|i| map[i]));
                map[id] = nodes.len() - 1;
            }
        }
        Expr { nodes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn square_at_one_plus_i() {
        let e = Expr::parse("xi^2").unwrap();
        let j = e.eval_jet(c(1.0, 1.0)).unwrap();
        assert_eq!(j.value, c(0.0, 2.0));
        assert_eq!(j.d, c(2.0, 2.0));
        assert_eq!(j.dbar, c(0.0, 0.0));
    }

    #[test]
    fn modulus_squared() {
        let e = Expr::parse("xi*conj(xi)").unwrap();
        let j = e.eval_jet(c(2.0, 0.0)).unwrap();
        assert_eq!(j.value, c(4.0, 0.0));
        assert_eq!(j.d, c(2.0, 0.0));
        assert_eq!(j.dbar, c(2.0, 0.0));
    }

    #[test]
    fn conj_var_derivatives() {
        let e = Expr::parse("conj(xi)").unwrap();
        for z in [c(0.0, 0.0), c(-1.5, 2.0), c(3.0, -0.1)] {
            let j = e.eval_jet(z).unwrap();
            assert_eq!(j.d, c(0.0, 0.0));
            assert_eq!(j.dbar, c(1.0, 0.0));
        }
    }

    #[test]
    fn division_by_zero_reports_node() {
        let e = Expr::parse("1/xi").unwrap();
        let err = e.eval_jet(c(0.0, 0.0)).unwrap_err();
        assert_eq!(err, ExprError::DivisionByZero { node: 2 });
        assert!(e.eval(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn substitution_composes() {
        let f = Expr::parse("xi^2 + conj(xi)").unwrap();
        let g = Expr::parse("2*xi + i").unwrap();
        let h = f.substitute(&g);
        let z = c(0.3, -0.4);
        let inner = g.eval(z).unwrap();
        let expect = f.eval(inner).unwrap();
        assert!((h.eval(z).unwrap() - expect).norm() < 1e-15);
        // chain rule: ∂h = 2·f_ξ(g) = 4g ; ∂̄h = 2 (from conj(2ν+i))
        let j = h.eval_jet(z).unwrap();
        assert!((j.d - 4.0 * inner).norm() < 1e-14);
        assert!((j.dbar - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn display_round_trips() {
        for text in ["xi^2 - 3.25i*conj(xi)/(1+xi*conj(xi))", "-exp(-xi)^3 + (2-0.5i)", "1/xi^2"] {
            let e = Expr::parse(text).unwrap();
            let back = Expr::parse(&e.to_string()).unwrap();
            for z in [c(0.7, 0.2), c(-1.1, 0.9)] {
                let a = e.eval(z).unwrap();
                let b = back.eval(z).unwrap();
                assert!((a - b).norm() <= 1e-15 * (1.0 + a.norm()), "{text}");
            }
        }
    }

    #[test]
    fn finish_prunes_unreachable() {
        let mut b = ExprBuilder::new();
        let x = b.var();
        let _dead = b.exp(x);
        let two = b.real(2.0);
        let y = b.mul(two, x);
        let e = b.finish(y);
        assert_eq!(e.len(), 3);
        assert!(e.is_holomorphic());
    }
}
