//! Central finite-difference verification of every differentiable
//! operation and of the assembled models.
//!
//! Each check builds the same scalar loss twice: once on a tape for
//! analytic gradients, and once per perturbed coordinate for the
//! two-sided difference quotient. Primitives must agree to 1e-6
//! relative, whole models to 1e-4, all at 64-bit.

use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::graph::EdgeList;
use crate::nn::{ArchKind, ModelConfig, ModelParams};
use crate::sample::sample_negatives_count;
use crate::synthetic::gnp_graph;
use crate::tensor::{Mat, Tape, Tensor};
use crate::train::TrainError;
use crate::transform::{transform, DummyFeatureStrategy, TransformConfig, TransformResult};

pub const FD_STEP: f64 = 1e-5;
pub const OP_TOLERANCE: f64 = 1e-6;
pub const MODEL_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradcheckReport {
    pub checks: Vec<CheckResult>,
    pub max_rel_error: f64,
    pub passed: bool,
}

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compare analytic gradients against central differences for a loss
/// built by `f`, which must bind `inputs` to the tape it is given and
/// return the scalar loss plus the bound input tensors (in order).
/// `f` must be a deterministic function of `inputs`; anything
/// stochastic inside has to reseed itself per call.
fn check<F>(name: &str, inputs: &[Mat<f64>], tol: f64, f: F) -> Result<CheckResult, TrainError>
where
    F: Fn(&Tape<f64>, &[Mat<f64>]) -> Result<(Tensor, Vec<Tensor>), TrainError>,
{
    let tape = Tape::new();
    let (loss, bound) = f(&tape, inputs)?;
    tape.backward(loss)?;
    let grads: Vec<Option<Mat<f64>>> = bound.iter().map(|&t| tape.grad(t)).collect();

    let value_at = |mats: &[Mat<f64>]| -> Result<f64, TrainError> {
        let t = Tape::new();
        let (l, _) = f(&t, mats)?;
        Ok(t.value(l)[(0, 0)])
    };

    let mut mats = inputs.to_vec();
    let mut max_rel = 0.0f64;
    for i in 0..mats.len() {
        for j in 0..mats[i].data().len() {
            let orig = mats[i].data()[j];
            mats[i].data_mut()[j] = orig + FD_STEP;
            let up = value_at(&mats)?;
            mats[i].data_mut()[j] = orig - FD_STEP;
            let down = value_at(&mats)?;
            mats[i].data_mut()[j] = orig;
            let numeric = (up - down) / (2.0 * FD_STEP);
            let analytic = grads[i].as_ref().map_or(0.0, |g| g.data()[j]);
            max_rel = max_rel.max(rel_err(analytic, numeric));
        }
    }
    Ok(CheckResult {
        name: name.to_string(),
        max_rel_error: max_rel,
        tolerance: tol,
        passed: max_rel < tol,
    })
}

fn rand_mat(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Mat<f64> {
    let mut m = Mat::zeros(rows, cols);
    for v in m.data_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    m
}

/// Values bounded away from zero so the FD step cannot cross the ReLU
/// kink.
fn rand_mat_off_kink(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Mat<f64> {
    let mut m = Mat::zeros(rows, cols);
    for v in m.data_mut() {
        let mag = rng.gen_range(0.05..1.0);
        *v = if rng.gen::<bool>() { mag } else { -mag };
    }
    m
}

fn model_fixture(
    strategy: DummyFeatureStrategy,
) -> Result<(TransformResult, Vec<usize>), TrainError> {
    let g = gnp_graph(10, 0.3, 7);
    let pos = g.edge_list();
    let k = (pos.len() / 3).max(1);
    let neg = sample_negatives_count(&g, k, 13, 100, &pos)
        .map_err(|e| TrainError::BadConfig(format!("fixture sampling failed: {e}")))?;
    let cfg = TransformConfig {
        dummy_feature_strategy: strategy,
        ..TransformConfig::default()
    };
    let res = transform(&g, &pos, &neg, &EdgeList::empty(), &cfg)?;
    let dummy_rows = if strategy == DummyFeatureStrategy::LearnedConstant {
        res.dummy_rows()
    } else {
        Vec::new()
    };
    Ok((res, dummy_rows))
}

fn check_model(
    name: &str,
    model: &ModelParams<f64>,
    res: &TransformResult,
    dummy_rows: &[usize],
) -> Result<CheckResult, TrainError> {
    let h = res.h();
    let features = h.features().clone();
    let adj = model.build_adjacency(h);
    let labels = res.class_ids();
    let mask = res.loss_mask().to_vec();
    let template = model.clone();
    let inputs: Vec<Mat<f64>> = model.mats().into_iter().cloned().collect();
    check(name, &inputs, MODEL_TOLERANCE, move |tape, mats| {
        let mut m = template.clone();
        for (dst, src) in m.mats_mut().into_iter().zip(mats) {
            *dst = src.clone();
        }
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let fwd = m.forward(tape, &adj, &features, dummy_rows, false, &mut rng)?;
        let loss = tape.masked_cross_entropy(fwd.output, &labels, &mask, None)?;
        Ok((loss, fwd.param_tensors))
    })
}

/// The full suite: one check per differentiable primitive, then the
/// 2-layer GCN and GraphSAGE classifiers (plus depth-3 and
/// learned-dummy variants) on a 10-node fixture.
pub fn run_gradcheck(seed: u64) -> Result<GradcheckReport, TrainError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let a = rand_mat(3, 4, &mut rng);
    let b = rand_mat(4, 2, &mut rng);
    checks.push(check("op.matmul", &[a, b], OP_TOLERANCE, |tape, mats| {
        let a = tape.leaf(mats[0].clone(), true);
        let b = tape.leaf(mats[1].clone(), true);
        let out = tape.matmul(a, b)?;
        Ok((tape.sum(out), vec![a, b]))
    })?);

    let sparse = {
        let g = gnp_graph(5, 0.6, seed.wrapping_add(1));
        Rc::new(crate::nn::build_normalized_adjacency::<f64>(&g))
    };
    let x = rand_mat(5, 3, &mut rng);
    checks.push(check("op.spmm", &[x], OP_TOLERANCE, move |tape, mats| {
        let x = tape.leaf(mats[0].clone(), true);
        let out = tape.spmm(&sparse, x)?;
        Ok((tape.sum(out), vec![x]))
    })?);

    let a = rand_mat(4, 3, &mut rng);
    let b = rand_mat(4, 3, &mut rng);
    checks.push(check("op.add", &[a, b], OP_TOLERANCE, |tape, mats| {
        let a = tape.leaf(mats[0].clone(), true);
        let b = tape.leaf(mats[1].clone(), true);
        let out = tape.add(a, b)?;
        Ok((tape.sum(out), vec![a, b]))
    })?);

    let a = rand_mat(4, 3, &mut rng);
    let b = rand_mat(4, 3, &mut rng);
    checks.push(check("op.mul_elem", &[a, b], OP_TOLERANCE, |tape, mats| {
        let a = tape.leaf(mats[0].clone(), true);
        let b = tape.leaf(mats[1].clone(), true);
        let out = tape.mul_elem(a, b)?;
        Ok((tape.sum(out), vec![a, b]))
    })?);

    let x = rand_mat(4, 3, &mut rng);
    let bias = rand_mat(1, 3, &mut rng);
    checks.push(check("op.add_bias", &[x, bias], OP_TOLERANCE, |tape, mats| {
        let x = tape.leaf(mats[0].clone(), true);
        let b = tape.leaf(mats[1].clone(), true);
        let out = tape.add_bias(x, b)?;
        Ok((tape.sum(out), vec![x, b]))
    })?);

    let x = rand_mat_off_kink(4, 5, &mut rng);
    let w = rand_mat(4, 5, &mut rng);
    checks.push(check("op.relu", &[x], OP_TOLERANCE, move |tape, mats| {
        let x = tape.leaf(mats[0].clone(), true);
        let weights = tape.leaf(w.clone(), false);
        let out = tape.mul_elem(tape.relu(x), weights)?;
        Ok((tape.sum(out), vec![x]))
    })?);

    let x = rand_mat(4, 5, &mut rng);
    checks.push(check("op.dropout", &[x], OP_TOLERANCE, |tape, mats| {
        let x = tape.leaf(mats[0].clone(), true);
        // fixed mask: the stream restarts on every evaluation
        let mut mask_rng = ChaCha20Rng::seed_from_u64(99);
        let out = tape.dropout(x, 0.7, true, &mut mask_rng)?;
        Ok((tape.sum(out), vec![x]))
    })?);

    let x = rand_mat(4, 3, &mut rng);
    let w = rand_mat(4, 3, &mut rng);
    checks.push(check("op.row_softmax", &[x], OP_TOLERANCE, move |tape, mats| {
        // weighted sum; a bare sum of softmax rows is constant 1
        let x = tape.leaf(mats[0].clone(), true);
        let weights = tape.leaf(w.clone(), false);
        let out = tape.mul_elem(tape.row_softmax(x), weights)?;
        Ok((tape.sum(out), vec![x]))
    })?);

    let logits = rand_mat(6, 3, &mut rng);
    let labels = vec![0usize, 1, 2, 1, 0, 2];
    let mask = vec![true, false, true, true, false, true];
    let lb = labels.clone();
    let mk = mask.clone();
    checks.push(check(
        "op.masked_cross_entropy",
        std::slice::from_ref(&logits),
        OP_TOLERANCE,
        move |tape, mats| {
            let x = tape.leaf(mats[0].clone(), true);
            let loss = tape.masked_cross_entropy(x, &lb, &mk, None)?;
            Ok((loss, vec![x]))
        },
    )?);
    checks.push(check(
        "op.masked_cross_entropy_weighted",
        &[logits],
        OP_TOLERANCE,
        move |tape, mats| {
            let x = tape.leaf(mats[0].clone(), true);
            let loss = tape.masked_cross_entropy(x, &labels, &mask, Some(&[1.0, 2.0, 0.5]))?;
            Ok((loss, vec![x]))
        },
    )?);

    let z = rand_mat(5, 4, &mut rng);
    checks.push(check("op.pair_dot", &[z], OP_TOLERANCE, |tape, mats| {
        let z = tape.leaf(mats[0].clone(), true);
        let dots = tape.pair_dot(z, &[(0, 1), (2, 3), (1, 4), (2, 2)])?;
        Ok((tape.sum(dots), vec![z]))
    })?);

    let scores = rand_mat(6, 1, &mut rng);
    checks.push(check("op.bce_with_logits", &[scores], OP_TOLERANCE, |tape, mats| {
        let s = tape.leaf(mats[0].clone(), true);
        let loss = tape.bce_with_logits(s, &[1.0, 0.0, 1.0, 1.0, 0.0, 0.0])?;
        Ok((loss, vec![s]))
    })?);

    let base = rand_mat(5, 3, &mut rng);
    let shared = rand_mat(1, 3, &mut rng);
    let w = rand_mat(5, 3, &mut rng);
    checks.push(check(
        "op.overwrite_rows_broadcast",
        &[base, shared],
        OP_TOLERANCE,
        move |tape, mats| {
            let base = tape.leaf(mats[0].clone(), true);
            let shared = tape.leaf(mats[1].clone(), true);
            let merged = tape.overwrite_rows_broadcast(base, shared, &[1, 3])?;
            let weights = tape.leaf(w.clone(), false);
            let out = tape.mul_elem(merged, weights)?;
            Ok((tape.sum(out), vec![base, shared]))
        },
    )?);

    let (res, no_dummy_rows) = model_fixture(DummyFeatureStrategy::Mean)?;
    let in_dim = res.h().feature_dim();
    for arch in [ArchKind::Gcn, ArchKind::Sage] {
        let cfg = ModelConfig {
            hidden: 8,
            ..ModelConfig::new(arch, seed.wrapping_add(2))
        };
        let model = ModelParams::<f64>::new_classifier(&cfg, in_dim)?;
        checks.push(check_model(
            &format!("model.{}_2layer", arch.name()),
            &model,
            &res,
            &no_dummy_rows,
        )?);
    }
    let deep = ModelConfig {
        hidden: 8,
        num_layers: 3,
        ..ModelConfig::new(ArchKind::Gcn, seed.wrapping_add(3))
    };
    let model = ModelParams::<f64>::new_classifier(&deep, in_dim)?;
    checks.push(check_model("model.gcn_3layer", &model, &res, &no_dummy_rows)?);

    let (res_learned, learned_rows) = model_fixture(DummyFeatureStrategy::LearnedConstant)?;
    let cfg = ModelConfig {
        hidden: 8,
        learned_dummy: true,
        ..ModelConfig::new(ArchKind::Gcn, seed.wrapping_add(4))
    };
    let model = ModelParams::<f64>::new_classifier(&cfg, res_learned.h().feature_dim())?;
    checks.push(check_model(
        "model.gcn_learned_dummy",
        &model,
        &res_learned,
        &learned_rows,
    )?);

    let max_rel_error = checks.iter().fold(0.0f64, |m, c| m.max(c.max_rel_error));
    let passed = checks.iter().all(|c| c.passed);
    Ok(GradcheckReport {
        checks,
        max_rel_error,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_suite_passes() {
        let report = run_gradcheck(0).unwrap();
        for c in &report.checks {
            assert!(
                c.passed,
                "{} failed: {} >= {}",
                c.name, c.max_rel_error, c.tolerance
            );
        }
        assert!(report.passed);
        // the comparison is real: finite differences never agree to
        // machine epsilon
        assert!(report.max_rel_error > 0.0);
        assert!(report.checks.len() >= 15);
    }

    #[test]
    fn suite_is_seed_deterministic() {
        let a = run_gradcheck(3).unwrap();
        let b = run_gradcheck(3).unwrap();
        let errs = |r: &GradcheckReport| -> Vec<f64> {
            r.checks.iter().map(|c| c.max_rel_error).collect()
        };
        assert_eq!(errs(&a), errs(&b));
    }
}
