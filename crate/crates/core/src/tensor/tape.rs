//! Reverse-mode differentiation on a per-forward-pass tape.
//!
//! Every operation appends one node holding its forward value and a
//! closure that maps the output gradient to gradient contributions for
//! its tracked inputs. Append order is a topological order of the DAG,
//! so the backward pass is a single reverse sweep with sum-of-paths
//! accumulation. A tape lives for one forward/backward cycle and is
//! rebuilt on the next pass.

use std::cell::RefCell;
use std::rc::Rc;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use super::mat::{Mat, Scalar};
use super::sparse::CsrMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("{op}: shape mismatch ({detail})")]
    ShapeMismatch { op: &'static str, detail: String },
    #[error("dropout keep probability {0} outside (0, 1]")]
    InvalidKeepProb(f64),
    #[error("cross-entropy mask selects no rows")]
    EmptyMask,
    #[error("label {label} at masked row {row} outside {classes} classes")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        classes: usize,
    },
    #[error("backward target has shape {rows}x{cols}, expected a 1x1 scalar")]
    NotScalar { rows: usize, cols: usize },
    #[error("backward already ran on this tape")]
    BackwardAlreadyRan,
}

/// Handle to a value on a [`Tape`]. Cheap to copy; the data lives in the
/// tape node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tensor {
    id: usize,
    rows: usize,
    cols: usize,
}

impl Tensor {
    pub fn rows(self) -> usize {
        self.rows
    }

    pub fn cols(self) -> usize {
        self.cols
    }

    pub fn shape(self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

type BackwardFn<S> = Box<dyn FnOnce(&Mat<S>) -> Vec<(usize, Mat<S>)>>;

struct Node<S: Scalar> {
    value: Mat<S>,
    /// Whether `value` is free of NaN/Inf. Ops must produce finite
    /// output from finite input; non-finite values may still flow in
    /// through leaves (e.g. diverged parameters) and are then caught by
    /// the training loop rather than here.
    finite: bool,
    grad: Option<Mat<S>>,
    requires_grad: bool,
    tracked: bool,
    backward: Option<BackwardFn<S>>,
}

pub struct Tape<S: Scalar> {
    nodes: RefCell<Vec<Node<S>>>,
    backward_ran: RefCell<bool>,
}

impl<S: Scalar> Default for Tape<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> Tape<S> {
    pub fn new() -> Self {
        Tape {
            nodes: RefCell::new(Vec::new()),
            backward_ran: RefCell::new(false),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Register an input value. Gradients are retained only for leaves
    /// created with `requires_grad = true`.
    pub fn leaf(&self, value: Mat<S>, requires_grad: bool) -> Tensor {
        // inputs are exempt from the finite-forward invariant
        self.push(value, requires_grad, requires_grad, None, false)
    }

    pub fn value(&self, t: Tensor) -> Mat<S> {
        self.nodes.borrow()[t.id].value.clone()
    }

    /// Gradient accumulated into a leaf by [`Tape::backward`]. `None`
    /// before backward or for tensors that do not require gradients.
    pub fn grad(&self, t: Tensor) -> Option<Mat<S>> {
        self.nodes.borrow()[t.id].grad.clone()
    }

    fn push(
        &self,
        value: Mat<S>,
        requires_grad: bool,
        tracked: bool,
        backward: Option<BackwardFn<S>>,
        parents_finite: bool,
    ) -> Tensor {
        let finite = value.is_finite();
        debug_assert!(
            finite || !parents_finite,
            "non-finite forward result from finite inputs"
        );
        let mut nodes = self.nodes.borrow_mut();
        let id = nodes.len();
        let (rows, cols) = value.shape();
        nodes.push(Node {
            value,
            finite,
            grad: None,
            requires_grad,
            tracked,
            backward,
        });
        Tensor { id, rows, cols }
    }

    fn tracked(&self, t: Tensor) -> bool {
        self.nodes.borrow()[t.id].tracked
    }

    fn finite(&self, t: Tensor) -> bool {
        self.nodes.borrow()[t.id].finite
    }

    /// Dense matrix product.
    pub fn matmul(&self, a: Tensor, b: Tensor) -> Result<Tensor, TensorError> {
        if a.cols != b.rows {
            return Err(TensorError::ShapeMismatch {
                op: "matmul",
                detail: format!("{}x{} * {}x{}", a.rows, a.cols, b.rows, b.cols),
            });
        }
        let (av, bv) = {
            let nodes = self.nodes.borrow();
            (nodes[a.id].value.clone(), nodes[b.id].value.clone())
        };
        let out = av.matmul(&bv);
        let (a_tracked, b_tracked) = (self.tracked(a), self.tracked(b));
        let backward: Option<BackwardFn<S>> = if a_tracked || b_tracked {
            Some(Box::new(move |g| {
                let mut contribs = Vec::new();
                if a_tracked {
                    contribs.push((a.id, g.matmul(&bv.transpose())));
                }
                if b_tracked {
                    contribs.push((b.id, av.transpose().matmul(g)));
                }
                contribs
            }))
        } else {
            None
        };
        Ok(self.push(out, false, a_tracked || b_tracked, backward, self.finite(a) && self.finite(b)))
    }

    /// Sparse-dense product `a * x`; the sparse operator is a constant.
    pub fn spmm(&self, a: &Rc<CsrMatrix<S>>, x: Tensor) -> Result<Tensor, TensorError> {
        if a.cols() != x.rows {
            return Err(TensorError::ShapeMismatch {
                op: "spmm",
                detail: format!("{}x{} * {}x{}", a.rows(), a.cols(), x.rows, x.cols),
            });
        }
        let xv = self.nodes.borrow()[x.id].value.clone();
        let out = a.spmm(&xv);
        let tracked = self.tracked(x);
        let backward: Option<BackwardFn<S>> = if tracked {
            let a = Rc::clone(a);
            Some(Box::new(move |g| vec![(x.id, a.spmm_transposed(g))]))
        } else {
            None
        };
        Ok(self.push(out, false, tracked, backward, self.finite(x)))
    }

    /// Elementwise sum of two same-shape tensors.
    pub fn add(&self, a: Tensor, b: Tensor) -> Result<Tensor, TensorError> {
        if a.shape() != b.shape() {
            return Err(TensorError::ShapeMismatch {
                op: "add",
                detail: format!("{}x{} + {}x{}", a.rows, a.cols, b.rows, b.cols),
            });
        }
        let mut out = self.nodes.borrow()[a.id].value.clone();
        out.add_assign(&self.nodes.borrow()[b.id].value);
        let (a_tracked, b_tracked) = (self.tracked(a), self.tracked(b));
        let backward: Option<BackwardFn<S>> = if a_tracked || b_tracked {
            Some(Box::new(move |g| {
                let mut contribs = Vec::new();
                if a_tracked {
                    contribs.push((a.id, g.clone()));
                }
                if b_tracked {
                    contribs.push((b.id, g.clone()));
                }
                contribs
            }))
        } else {
            None
        };
        Ok(self.push(out, false, a_tracked || b_tracked, backward, self.finite(a) && self.finite(b)))
    }

    /// Elementwise product of two same-shape tensors.
    pub fn mul_elem(&self, a: Tensor, b: Tensor) -> Result<Tensor, TensorError> {
        if a.shape() != b.shape() {
            return Err(TensorError::ShapeMismatch {
                op: "mul_elem",
                detail: format!("{}x{} * {}x{}", a.rows, a.cols, b.rows, b.cols),
            });
        }
        let (av, bv) = {
            let nodes = self.nodes.borrow();
            (nodes[a.id].value.clone(), nodes[b.id].value.clone())
        };
        let mut out = av.clone();
        for (o, &bv) in out.data_mut().iter_mut().zip(bv.data()) {
            *o *= bv;
        }
        let (a_tracked, b_tracked) = (self.tracked(a), self.tracked(b));
        let backward: Option<BackwardFn<S>> = if a_tracked || b_tracked {
            Some(Box::new(move |g| {
                let mut contribs = Vec::new();
                if a_tracked {
                    let mut da = g.clone();
                    for (d, &v) in da.data_mut().iter_mut().zip(bv.data()) {
                        *d *= v;
                    }
                    contribs.push((a.id, da));
                }
                if b_tracked {
                    let mut db = g.clone();
                    for (d, &v) in db.data_mut().iter_mut().zip(av.data()) {
                        *d *= v;
                    }
                    contribs.push((b.id, db));
                }
                contribs
            }))
        } else {
            None
        };
        Ok(self.push(out, false, a_tracked || b_tracked, backward, self.finite(a) && self.finite(b)))
    }

    /// Add a `1 x cols` bias row to every row of `x`. The only broadcast
    /// the engine supports; everything else must match shapes exactly.
    pub fn add_bias(&self, x: Tensor, bias: Tensor) -> Result<Tensor, TensorError> {
        if bias.rows != 1 || bias.cols != x.cols {
            return Err(TensorError::ShapeMismatch {
                op: "add_bias",
                detail: format!("{}x{} + bias {}x{}", x.rows, x.cols, bias.rows, bias.cols),
            });
        }
        let mut out = self.nodes.borrow()[x.id].value.clone();
        {
            let nodes = self.nodes.borrow();
            let b = nodes[bias.id].value.row(0);
            for r in 0..out.rows() {
                for (o, &bv) in out.row_mut(r).iter_mut().zip(b) {
                    *o += bv;
                }
            }
        }
        let (x_tracked, b_tracked) = (self.tracked(x), self.tracked(bias));
        let backward: Option<BackwardFn<S>> = if x_tracked || b_tracked {
            Some(Box::new(move |g| {
                let mut contribs = Vec::new();
                if x_tracked {
                    contribs.push((x.id, g.clone()));
                }
                if b_tracked {
                    let mut db = Mat::zeros(1, g.cols());
                    for r in 0..g.rows() {
                        for (d, &gv) in db.row_mut(0).iter_mut().zip(g.row(r)) {
                            *d += gv;
                        }
                    }
                    contribs.push((bias.id, db));
                }
                contribs
            }))
        } else {
            None
        };
        Ok(self.push(out, false, x_tracked || b_tracked, backward, self.finite(x) && self.finite(bias)))
    }

    pub fn relu(&self, x: Tensor) -> Tensor {
        let xv = self.nodes.borrow()[x.id].value.clone();
        // `max` would swallow NaN; keep it so divergence surfaces in the loss.
        let out = xv.map(|v| if v > S::zero() || v.is_nan() { v } else { S::zero() });
        let tracked = self.tracked(x);
        let backward: Option<BackwardFn<S>> = if tracked {
            Some(Box::new(move |g| {
                let mut dx = g.clone();
                for (d, &v) in dx.data_mut().iter_mut().zip(xv.data()) {
                    if v <= S::zero() {
                        *d = S::zero();
                    }
                }
                vec![(x.id, dx)]
            }))
        } else {
            None
        };
        self.push(out, false, tracked, backward, self.finite(x))
    }

    /// Inverted dropout. In train mode each entry is kept with probability
    /// `keep_prob` and scaled by `1 / keep_prob`; in eval mode (or with
    /// `keep_prob == 1`) the input tensor is returned untouched.
    pub fn dropout(
        &self,
        x: Tensor,
        keep_prob: f64,
        train: bool,
        rng: &mut ChaCha20Rng,
    ) -> Result<Tensor, TensorError> {
        if !(keep_prob > 0.0 && keep_prob <= 1.0) {
            return Err(TensorError::InvalidKeepProb(keep_prob));
        }
        if !train || keep_prob == 1.0 {
            return Ok(x);
        }
        let scale = S::from_f64(1.0 / keep_prob);
        let xv = self.nodes.borrow()[x.id].value.clone();
        let mut factors = Mat::zeros(x.rows, x.cols);
        for f in factors.data_mut() {
            if rng.gen::<f64>() < keep_prob {
                *f = scale;
            }
        }
        let mut out = xv;
        for (o, &f) in out.data_mut().iter_mut().zip(factors.data()) {
            *o *= f;
        }
        let tracked = self.tracked(x);
        let backward: Option<BackwardFn<S>> = if tracked {
            Some(Box::new(move |g| {
                let mut dx = g.clone();
                for (d, &f) in dx.data_mut().iter_mut().zip(factors.data()) {
                    *d *= f;
                }
                vec![(x.id, dx)]
            }))
        } else {
            None
        };
        Ok(self.push(out, false, tracked, backward, self.finite(x)))
    }

    /// Softmax over each row, stabilized by the row maximum.
    pub fn row_softmax(&self, x: Tensor) -> Tensor {
        let xv = self.nodes.borrow()[x.id].value.clone();
        let mut out = Mat::zeros(x.rows, x.cols);
        for r in 0..x.rows {
            softmax_row(xv.row(r), out.row_mut(r));
        }
        let tracked = self.tracked(x);
        let y = out.clone();
        let backward: Option<BackwardFn<S>> = if tracked {
            Some(Box::new(move |g| {
                let mut dx = Mat::zeros(g.rows(), g.cols());
                for r in 0..g.rows() {
                    let yr = y.row(r);
                    let gr = g.row(r);
                    let mut dot = S::zero();
                    for (&yv, &gv) in yr.iter().zip(gr) {
                        dot += yv * gv;
                    }
                    for ((d, &yv), &gv) in dx.row_mut(r).iter_mut().zip(yr).zip(gr) {
                        *d = yv * (gv - dot);
                    }
                }
                vec![(x.id, dx)]
            }))
        } else {
            None
        };
        self.push(out, false, tracked, backward, self.finite(x))
    }

    /// Mean negative log-likelihood over masked rows, optionally weighted
    /// per class. Log-sum-exp keeps the result finite for huge logits.
    /// Gradients reach `logits` only on masked rows.
    pub fn masked_cross_entropy(
        &self,
        logits: Tensor,
        labels: &[usize],
        mask: &[bool],
        class_weights: Option<&[f64]>,
    ) -> Result<Tensor, TensorError> {
        let classes = logits.cols;
        if labels.len() != logits.rows || mask.len() != logits.rows {
            return Err(TensorError::ShapeMismatch {
                op: "masked_cross_entropy",
                detail: format!(
                    "{} logits rows, {} labels, {} mask entries",
                    logits.rows,
                    labels.len(),
                    mask.len()
                ),
            });
        }
        if let Some(w) = class_weights {
            if w.len() != classes {
                return Err(TensorError::ShapeMismatch {
                    op: "masked_cross_entropy",
                    detail: format!("{} class weights for {} classes", w.len(), classes),
                });
            }
        }
        if !mask.iter().any(|&m| m) {
            return Err(TensorError::EmptyMask);
        }
        for (r, (&label, &m)) in labels.iter().zip(mask).enumerate() {
            if m && label >= classes {
                return Err(TensorError::LabelOutOfRange {
                    row: r,
                    label,
                    classes,
                });
            }
        }

        let weights: Vec<f64> = match class_weights {
            Some(w) => w.to_vec(),
            None => vec![1.0; classes],
        };
        let xv = self.nodes.borrow()[logits.id].value.clone();
        let mut total = S::zero();
        let mut weight_sum = S::zero();
        for r in 0..logits.rows {
            if !mask[r] {
                continue;
            }
            let row = xv.row(r);
            let lse = log_sum_exp(row);
            let w = S::from_f64(weights[labels[r]]);
            total += w * (lse - row[labels[r]]);
            weight_sum += w;
        }
        let loss = total / weight_sum;

        let labels = labels.to_vec();
        let mask = mask.to_vec();
        let tracked = self.tracked(logits);
        let backward: Option<BackwardFn<S>> = if tracked {
            Some(Box::new(move |g| {
                let scale = g[(0, 0)] / weight_sum;
                let mut dx = Mat::zeros(xv.rows(), xv.cols());
                for r in 0..xv.rows() {
                    if !mask[r] {
                        continue;
                    }
                    let w = S::from_f64(weights[labels[r]]);
                    softmax_row(xv.row(r), dx.row_mut(r));
                    for d in dx.row_mut(r).iter_mut() {
                        *d *= w * scale;
                    }
                    dx[(r, labels[r])] -= w * scale;
                }
                vec![(logits.id, dx)]
            }))
        } else {
            None
        };
        Ok(self.push(Mat::from_elem(1, 1, loss), false, tracked, backward, self.finite(logits)))
    }

    /// Row-pair inner products: output `k` is `<z[u_k], z[v_k]>`.
    pub fn pair_dot(&self, z: Tensor, pairs: &[(usize, usize)]) -> Result<Tensor, TensorError> {
        if let Some(&(u, v)) = pairs.iter().find(|&&(u, v)| u >= z.rows || v >= z.rows) {
            return Err(TensorError::ShapeMismatch {
                op: "pair_dot",
                detail: format!("pair ({u}, {v}) outside {} embedding rows", z.rows),
            });
        }
        let zv = self.nodes.borrow()[z.id].value.clone();
        let mut out = Mat::zeros(pairs.len(), 1);
        for (k, &(u, v)) in pairs.iter().enumerate() {
            let mut dot = S::zero();
            for (&a, &b) in zv.row(u).iter().zip(zv.row(v)) {
                dot += a * b;
            }
            out[(k, 0)] = dot;
        }
        let tracked = self.tracked(z);
        let pairs = pairs.to_vec();
        let backward: Option<BackwardFn<S>> = if tracked {
            Some(Box::new(move |g| {
                let mut dz = Mat::zeros(zv.rows(), zv.cols());
                for (k, &(u, v)) in pairs.iter().enumerate() {
                    let gk = g[(k, 0)];
                    let vu: Vec<S> = zv.row(u).to_vec();
                    for (d, &b) in dz.row_mut(u).iter_mut().zip(zv.row(v)) {
                        *d += gk * b;
                    }
                    for (d, &a) in dz.row_mut(v).iter_mut().zip(&vu) {
                        *d += gk * a;
                    }
                }
                vec![(z.id, dz)]
            }))
        } else {
            None
        };
        Ok(self.push(out, false, tracked, backward, self.finite(z)))
    }

    /// Mean binary cross-entropy of an `m x 1` logit column against 0/1
    /// targets, in the numerically safe softplus form.
    pub fn bce_with_logits(&self, scores: Tensor, targets: &[f64]) -> Result<Tensor, TensorError> {
        if scores.cols != 1 || targets.len() != scores.rows {
            return Err(TensorError::ShapeMismatch {
                op: "bce_with_logits",
                detail: format!(
                    "{}x{} scores, {} targets",
                    scores.rows,
                    scores.cols,
                    targets.len()
                ),
            });
        }
        if targets.is_empty() {
            return Err(TensorError::EmptyMask);
        }
        let sv = self.nodes.borrow()[scores.id].value.clone();
        let m = S::from_f64(targets.len() as f64);
        let mut total = S::zero();
        for (k, &t) in targets.iter().enumerate() {
            let s = sv[(k, 0)];
            total += softplus(s) - S::from_f64(t) * s;
        }
        let loss = total / m;
        let tracked = self.tracked(scores);
        let targets = targets.to_vec();
        let backward: Option<BackwardFn<S>> = if tracked {
            Some(Box::new(move |g| {
                let scale = g[(0, 0)] / m;
                let mut ds = Mat::zeros(sv.rows(), 1);
                for (k, &t) in targets.iter().enumerate() {
                    ds[(k, 0)] = (sigmoid(sv[(k, 0)]) - S::from_f64(t)) * scale;
                }
                vec![(scores.id, ds)]
            }))
        } else {
            None
        };
        Ok(self.push(Mat::from_elem(1, 1, loss), false, tracked, backward, self.finite(scores)))
    }

    /// Copy of `base` with the listed rows replaced by a shared `1 x cols`
    /// row. Gradients for the shared row are the sum over all its uses.
    pub fn overwrite_rows_broadcast(
        &self,
        base: Tensor,
        shared: Tensor,
        rows: &[usize],
    ) -> Result<Tensor, TensorError> {
        if shared.rows != 1 || shared.cols != base.cols {
            return Err(TensorError::ShapeMismatch {
                op: "overwrite_rows_broadcast",
                detail: format!(
                    "base {}x{}, shared {}x{}",
                    base.rows, base.cols, shared.rows, shared.cols
                ),
            });
        }
        if let Some(&r) = rows.iter().find(|&&r| r >= base.rows) {
            return Err(TensorError::ShapeMismatch {
                op: "overwrite_rows_broadcast",
                detail: format!("row {r} outside {} base rows", base.rows),
            });
        }
        let mut out = self.nodes.borrow()[base.id].value.clone();
        {
            let nodes = self.nodes.borrow();
            let s = nodes[shared.id].value.row(0);
            for &r in rows {
                out.row_mut(r).copy_from_slice(s);
            }
        }
        let (base_tracked, shared_tracked) = (self.tracked(base), self.tracked(shared));
        let rows = rows.to_vec();
        let backward: Option<BackwardFn<S>> = if base_tracked || shared_tracked {
            Some(Box::new(move |g| {
                let mut contribs = Vec::new();
                if shared_tracked {
                    let mut ds = Mat::zeros(1, g.cols());
                    for &r in &rows {
                        for (d, &gv) in ds.row_mut(0).iter_mut().zip(g.row(r)) {
                            *d += gv;
                        }
                    }
                    contribs.push((shared.id, ds));
                }
                if base_tracked {
                    let mut db = g.clone();
                    for &r in &rows {
                        for d in db.row_mut(r) {
                            *d = S::zero();
                        }
                    }
                    contribs.push((base.id, db));
                }
                contribs
            }))
        } else {
            None
        };
        Ok(self.push(out, false, base_tracked || shared_tracked, backward, self.finite(base) && self.finite(shared)))
    }

    /// Sum of all entries as a 1x1 tensor.
    pub fn sum(&self, x: Tensor) -> Tensor {
        let xv = self.nodes.borrow()[x.id].value.clone();
        let mut total = S::zero();
        for &v in xv.data() {
            total += v;
        }
        let tracked = self.tracked(x);
        let backward: Option<BackwardFn<S>> = if tracked {
            Some(Box::new(move |g| {
                vec![(x.id, Mat::from_elem(xv.rows(), xv.cols(), g[(0, 0)]))]
            }))
        } else {
            None
        };
        self.push(Mat::from_elem(1, 1, total), false, tracked, backward, self.finite(x))
    }

    /// Reverse sweep from a scalar loss; accumulates gradients into every
    /// leaf that requires them. A tensor consumed by several operations
    /// receives the sum of all path contributions.
    pub fn backward(&self, loss: Tensor) -> Result<(), TensorError> {
        if loss.rows != 1 || loss.cols != 1 {
            return Err(TensorError::NotScalar {
                rows: loss.rows,
                cols: loss.cols,
            });
        }
        if std::mem::replace(&mut *self.backward_ran.borrow_mut(), true) {
            return Err(TensorError::BackwardAlreadyRan);
        }
        let mut nodes = self.nodes.borrow_mut();
        let mut pending: Vec<Option<Mat<S>>> = (0..nodes.len()).map(|_| None).collect();
        pending[loss.id] = Some(Mat::from_elem(1, 1, S::one()));
        for id in (0..=loss.id).rev() {
            let Some(g) = pending[id].take() else { continue };
            let node = &mut nodes[id];
            if node.requires_grad {
                match &mut node.grad {
                    Some(acc) => acc.add_assign(&g),
                    slot => *slot = Some(g.clone()),
                }
            }
            if let Some(f) = node.backward.take() {
                for (pid, contrib) in f(&g) {
                    debug_assert!(pid < id, "backward edge must point earlier on the tape");
                    match &mut pending[pid] {
                        Some(acc) => acc.add_assign(&contrib),
                        slot => *slot = Some(contrib),
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn softmax_row<S: Scalar>(row: &[S], out: &mut [S]) {
    let mut max = S::neg_infinity();
    for &v in row {
        max = max.max(v);
    }
    let mut denom = S::zero();
    for (o, &v) in out.iter_mut().zip(row) {
        let e = (v - max).exp();
        *o = e;
        denom += e;
    }
    for o in out.iter_mut() {
        *o /= denom;
    }
}

fn log_sum_exp<S: Scalar>(row: &[S]) -> S {
    let mut max = S::neg_infinity();
    for &v in row {
        max = max.max(v);
    }
    let mut sum = S::zero();
    for &v in row {
        sum += (v - max).exp();
    }
    max + sum.ln()
}

fn softplus<S: Scalar>(x: S) -> S {
    x.max(S::zero()) + ((-x.abs()).exp() + S::one()).ln()
}

fn sigmoid<S: Scalar>(x: S) -> S {
    if x >= S::zero() {
        S::one() / (S::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (S::one() + e)
    }
}

/// Logistic link used by the inner-product edge scorer.
pub fn sigmoid_f64(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
