use num_complex::Complex64 as Complex;

use super::{Expr, ExprBuilder, ExprError, Node, NodeId};

/// Which Wirtinger derivative to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wirtinger {
    /// `∂/∂ξ`
    D,
    /// `∂/∂ξ̄`
    Dbar,
}

impl Expr {
    /// Symbolic Wirtinger derivative, returned as a new expression.
    ///
    /// Used where second derivatives are needed (Newton on `∂̄F`): the
    /// derivative expression is itself evaluated with first-order jets.
    pub fn wirtinger(&self, which: Wirtinger) -> Expr {
        let mut b = ExprBuilder::new();
        let var = b.var();
        let map = b.import_map(self, var);
        // (∂, ∂̄) of each original node; None means identically zero.
        let mut der: Vec<(Option<NodeId>, Option<NodeId>)> = Vec::with_capacity(self.len());
        let id = |i: usize| NodeId(map[i]);
        for (i, node) in self.nodes.iter().enumerate() {
            let pair = match *node {
                Node::Var => (Some(b.real(1.0)), None),
                Node::Const(_) => (None, None),
                Node::Conj(a) => {
                    let (da, dba) = der[a];
                    (dba.map(|x| b.conj(x)), da.map(|x| b.conj(x)))
                }
                Node::Neg(a) => {
                    let (da, dba) = der[a];
                    (da.map(|x| b.neg(x)), dba.map(|x| b.neg(x)))
                }
                Node::Add(a, c) | Node::Sub(a, c) => {
                    let sub = matches!(node, Node::Sub(..));
                    let mut comb = |x: Option<NodeId>, y: Option<NodeId>| match (x, y) {
                        (None, None) => None,
                        (Some(x), None) => Some(x),
                        (None, Some(y)) => Some(if sub { b.neg(y) } else { y }),
                        (Some(x), Some(y)) => Some(if sub { b.sub(x, y) } else { b.add(x, y) }),
                    };
                    (comb(der[a].0, der[c].0), comb(der[a].1, der[c].1))
                }
                Node::Mul(a, c) => {
                    let mut prod = |x: Option<NodeId>, y: Option<NodeId>| {
                        let l = x.map(|x| b.mul(x, id(c)));
                        let r = y.map(|y| b.mul(id(a), y));
                        match (l, r) {
                            (None, None) => None,
                            (Some(l), None) => Some(l),
                            (None, Some(r)) => Some(r),
                            (Some(l), Some(r)) => Some(b.add(l, r)),
                        }
                    };
                    (prod(der[a].0, der[c].0), prod(der[a].1, der[c].1))
                }
                Node::Div(a, c) => {
                    // (a'/c) - (a/c)·c'/c with a/c the node itself
                    let mut quot = |x: Option<NodeId>, y: Option<NodeId>| {
                        let num = match (x, y) {
                            (None, None) => return None,
                            (Some(x), None) => x,
                            (x, Some(y)) => {
                                let qy = b.mul(id(i), y);
                                match x {
                                    Some(x) => b.sub(x, qy),
                                    None => b.neg(qy),
                                }
                            }
                        };
                        Some(b.div(num, id(c)))
                    };
                    (quot(der[a].0, der[c].0), quot(der[a].1, der[c].1))
                }
                Node::IntPow(a, n) => {
                    if n == 0 {
                        (None, None)
                    } else {
                        let lower = if n == 1 { b.real(1.0) } else { b.powi(id(a), n - 1) };
                        let coef = b.scale(Complex::new(f64::from(n), 0.0), lower);
                        let (da, dba) = der[a];
                        (da.map(|x| b.mul(coef, x)), dba.map(|x| b.mul(coef, x)))
                    }
                }
                Node::Exp(a) => {
                    let (da, dba) = der[a];
                    (da.map(|x| b.mul(id(i), x)), dba.map(|x| b.mul(id(i), x)))
                }
            };
            der.push(pair);
        }
        let (d, dbar) = *der.last().expect("non-empty");
        let out = match which {
            Wirtinger::D => d,
            Wirtinger::Dbar => dbar,
        };
        let root = out.unwrap_or_else(|| b.real(0.0));
        b.finish(root)
    }
}

/// Largest discrepancy between the jet derivatives and central differences.
///
/// With `f_u`, `f_v` the central differences along `ν = u + iv`, the
/// Wirtinger derivatives are `∂ = ½(f_u − i f_v)` and `∂̄ = ½(f_u + i f_v)`.
pub fn finite_diff_residual(expr: &Expr, xi: Complex, h: f64) -> Result<f64, ExprError> {
    assert!(h > 0.0, "step must be positive");
    let jet = expr.eval_jet(xi)?;
    let fu = (expr.eval(xi + h)? - expr.eval(xi - h)?) / (2.0 * h);
    let ih = Complex::new(0.0, h);
    let fv = (expr.eval(xi + ih)? - expr.eval(xi - ih)?) / (2.0 * h);
    let d = 0.5 * (fu - Complex::i() * fv);
    let dbar = 0.5 * (fu + Complex::i() * fv);
    Ok((jet.d - d).norm().max((jet.dbar - dbar).norm()))
}
