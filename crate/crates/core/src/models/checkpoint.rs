//! Binary model checkpoints.
//!
//! Layout:
//!
//! ```text
//! b"FTHRCKPT"                 8-byte magic
//! header_len: u64 LE          length of the JSON header
//! header: UTF-8 JSON          kind, k, d, r, classes, hidden, tensor shapes
//! payload: f64 LE ...         tensors in header order, row-major
//! ```

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{ModelKind, ModelParams, Weights};
use crate::charfunc::EvaluationGrid;
use crate::error::{FeatherError, Result};

pub const MAGIC: &[u8; 8] = b"FTHRCKPT";
pub const LAYOUT_VERSION: u32 = 1;
const MAX_HEADER_LEN: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorInfo {
    pub name: String,
    pub shape: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub layout_version: u32,
    pub kind: ModelKind,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    pub num_classes: usize,
    pub hidden: Option<usize>,
    pub feature_names: Vec<String>,
    pub tensors: Vec<TensorInfo>,
}

fn bad(msg: impl Into<String>) -> FeatherError {
    FeatherError::Checkpoint(msg.into())
}

fn expected_tensors(
    kind: ModelKind,
    k: usize,
    d: usize,
    r: usize,
    c: usize,
    hidden: Option<usize>,
) -> Result<Vec<TensorInfo>> {
    let width = 2usize
        .checked_mul(k)
        .and_then(|v| v.checked_mul(d))
        .and_then(|v| v.checked_mul(r))
        .ok_or_else(|| bad("embedding width overflows"))?;
    let t = |name: &str, rows, cols| TensorInfo {
        name: name.into(),
        shape: [rows, cols],
    };
    let mut out = vec![t("theta", k, d)];
    match (kind, hidden) {
        (ModelKind::Softmax, None) => out.push(t("beta", width, c)),
        (ModelKind::Neural, Some(h)) if h > 0 => {
            out.push(t("beta0", width, h));
            out.push(t("beta1", h, c));
        }
        _ => return Err(bad("hidden width does not match model kind")),
    }
    Ok(out)
}

/// Serializes parameters into the checkpoint layout.
pub fn to_bytes(params: &ModelParams) -> Vec<u8> {
    let header = CheckpointHeader {
        layout_version: LAYOUT_VERSION,
        kind: params.kind(),
        k: params.k(),
        d: params.d(),
        r: params.r(),
        num_classes: params.num_classes,
        hidden: params.hidden(),
        feature_names: params.feature_names.clone(),
        tensors: expected_tensors(
            params.kind(),
            params.k(),
            params.d(),
            params.r(),
            params.num_classes,
            params.hidden(),
        )
        .expect("valid parameters"),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(16 + json.len() + 8 * params.num_trainable());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for v in params.to_flat() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses and validates a checkpoint.
pub fn from_bytes(bytes: &[u8]) -> Result<ModelParams> {
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(bad("missing magic"));
    }
    let header_len = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if header_len > MAX_HEADER_LEN || header_len > (bytes.len() - 16) as u64 {
        return Err(bad("header length out of range"));
    }
    let header_end = 16 + header_len as usize;
    let header: CheckpointHeader =
        serde_json::from_slice(&bytes[16..header_end]).map_err(|e| bad(format!("header: {e}")))?;

    if header.layout_version != LAYOUT_VERSION {
        return Err(bad(format!(
            "unsupported layout version {}",
            header.layout_version
        )));
    }
    if header.k == 0 || header.d == 0 || header.r == 0 || header.num_classes == 0 {
        return Err(bad("dimensions must be positive"));
    }
    if header.feature_names.len() != header.k {
        return Err(bad("feature name count differs from k"));
    }
    let expected = expected_tensors(
        header.kind,
        header.k,
        header.d,
        header.r,
        header.num_classes,
        header.hidden,
    )?;
    if header.tensors != expected {
        return Err(bad("tensor table does not match model dimensions"));
    }

    let payload = &bytes[header_end..];
    let mut total = 0usize;
    for t in &expected {
        let n = t.shape[0]
            .checked_mul(t.shape[1])
            .ok_or_else(|| bad("tensor size overflows"))?;
        total = total
            .checked_add(n)
            .ok_or_else(|| bad("tensor size overflows"))?;
    }
    if total.checked_mul(8) != Some(payload.len()) {
        return Err(bad(format!(
            "payload holds {} bytes, tensors need {} values",
            payload.len(),
            total
        )));
    }
    let mut values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    if payload
        .chunks_exact(8)
        .any(|c| !f64::from_le_bytes(c.try_into().unwrap()).is_finite())
    {
        return Err(bad("non-finite parameter"));
    }
    let mut take = |rows: usize, cols: usize| {
        Array2::from_shape_vec((rows, cols), values.by_ref().take(rows * cols).collect())
            .expect("sizes checked")
    };
    let theta = take(header.k, header.d);
    let theta = EvaluationGrid::from_points(
        theta.rows().into_iter().map(|r| r.to_vec()).collect(),
        header.r,
    )?;
    let width = 2 * header.k * header.d * header.r;
    let weights = match (header.kind, header.hidden) {
        (ModelKind::Softmax, _) => Weights::Softmax {
            beta: take(width, header.num_classes),
        },
        (ModelKind::Neural, Some(h)) => Weights::Neural {
            beta0: take(width, h),
            beta1: take(h, header.num_classes),
        },
        (ModelKind::Neural, None) => unreachable!("checked by expected_tensors"),
    };
    Ok(ModelParams {
        theta,
        weights,
        feature_names: header.feature_names,
        num_classes: header.num_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::TrainConfig;
    use proptest::prelude::*;

    fn params(kind: ModelKind, seed: u64) -> ModelParams {
        let cfg = TrainConfig {
            d: 3,
            r: 2,
            hidden: 5,
            seed,
            ..TrainConfig::default()
        };
        ModelParams::init(kind, vec!["a".into(), "b".into()], 3, &cfg).unwrap()
    }

    #[test]
    fn round_trip_both_kinds() {
        for kind in [ModelKind::Softmax, ModelKind::Neural] {
            let p = params(kind, 2);
            assert_eq!(from_bytes(&to_bytes(&p)).unwrap(), p);
        }
    }

    #[test]
    fn rejects_truncation_and_garbage() {
        let bytes = to_bytes(&params(ModelKind::Neural, 1));
        assert!(from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(from_bytes(b"FTHRCKPT").is_err());
        assert!(from_bytes(b"not a checkpoint at all").is_err());
        let mut extra = bytes.clone();
        extra.extend_from_slice(&[0; 8]);
        assert!(from_bytes(&extra).is_err());
    }

    #[test]
    fn rejects_non_finite_payload() {
        let mut bytes = to_bytes(&params(ModelKind::Softmax, 1));
        let n = bytes.len();
        bytes[n - 8..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(
            from_bytes(&bytes),
            Err(FeatherError::Checkpoint(_))
        ));
    }

    proptest! {
        #[test]
        fn arbitrary_bytes_never_panic(data in proptest::collection::vec(any::<u8>(), 0..256)) {
            let _ = from_bytes(&data);
        }

        #[test]
        fn corrupted_checkpoints_never_panic(pos in 0usize..400, byte in any::<u8>()) {
            let mut bytes = to_bytes(&params(ModelKind::Neural, 0));
            let pos = pos % bytes.len();
            bytes[pos] = byte;
            let _ = from_bytes(&bytes);
        }
    }
}
