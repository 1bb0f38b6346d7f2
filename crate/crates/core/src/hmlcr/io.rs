//! Model file and loss-trace persistence.
//!
//! ```text
//! hmlcr-model <version>
//! dx <d^x>
//! dy <d^y>
//! k <k>
//! lambda1 <v>   (and the remaining hyperparameters, one per line)
//! fingerprint <hex>
//! weighting <count|tf-idf>
//! vocabulary <n>
//! <one token per line>
//! features <n>
//! <one key per line>
//! U
//! <dense block>
//! V
//! <dense block>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::train::Model;
use super::Hyperparams;
use crate::error::{Error, Result};
use crate::vectorize::{parse_dense, write_dense, FeatureIndex, Vocabulary, Weighting};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// What a trained model needs to be applied to new queries.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub hyper: Hyperparams,
    pub fingerprint: String,
    pub weighting: Weighting,
    pub vocabulary: Vocabulary,
    pub features: FeatureIndex,
}

impl ModelFile {
    pub fn new(
        model: &Model,
        fingerprint: &str,
        weighting: Weighting,
        vocabulary: Vocabulary,
        features: FeatureIndex,
    ) -> Self {
        ModelFile {
            u: model.u.clone(),
            v: model.v.clone(),
            hyper: model.hyper,
            fingerprint: fingerprint.to_string(),
            weighting,
            vocabulary,
            features,
        }
    }

    pub fn to_text(&self) -> String {
        let h = &self.hyper;
        let mut out = String::new();
        let _ = writeln!(out, "hmlcr-model {MODEL_FORMAT_VERSION}");
        let _ = writeln!(out, "dx {}", self.u.nrows());
        let _ = writeln!(out, "dy {}", self.v.nrows());
        let _ = writeln!(out, "k {}", self.u.ncols());
        let _ = writeln!(out, "lambda1 {:.16e}", h.lambda1);
        let _ = writeln!(out, "lambda2 {:.16e}", h.lambda2);
        let _ = writeln!(out, "lambda3 {:.16e}", h.lambda3);
        let _ = writeln!(out, "eta {:.16e}", h.eta);
        let _ = writeln!(out, "max_iter {}", h.max_iter);
        let _ = writeln!(out, "tol {:.16e}", h.tol);
        let _ = writeln!(out, "seed {}", h.seed);
        let _ = writeln!(out, "backtracking {}", h.backtracking);
        let _ = writeln!(out, "fingerprint {}", self.fingerprint);
        let _ = writeln!(out, "weighting {}", self.weighting.as_str());
        let _ = writeln!(out, "vocabulary {}", self.vocabulary.len());
        for t in self.vocabulary.iter() {
            out.push_str(t);
            out.push('\n');
        }
        let _ = writeln!(out, "features {}", self.features.len());
        for k in self.features.iter() {
            out.push_str(k);
            out.push('\n');
        }
        out.push_str("U\n");
        out.push_str(&write_dense(&self.u));
        out.push_str("V\n");
        out.push_str(&write_dense(&self.v));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::format("model file", m);
        let mut lines = text.lines();
        fn next_field<'a>(lines: &mut impl Iterator<Item = &'a str>, name: &str) -> Result<String> {
            let bad = |m: String| Error::format("model file", m);
            let line = lines.next().ok_or_else(|| bad(format!("missing `{name}`")))?;
            match line.split_once(' ') {
                Some((n, v)) if n == name => Ok(v.to_string()),
                _ => Err(bad(format!("expected `{name}`, found `{line}`"))),
            }
        }
        fn num<T: std::str::FromStr>(v: String, name: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::format("model file", format!("bad value for `{name}`: `{v}`")))
        }

        let version: u32 = num(next_field(&mut lines, "hmlcr-model")?, "hmlcr-model")?;
        if version != MODEL_FORMAT_VERSION {
            return Err(bad(format!("unsupported format version {version}")));
        }
        let dx: usize = num(next_field(&mut lines, "dx")?, "dx")?;
        let dy: usize = num(next_field(&mut lines, "dy")?, "dy")?;
        let k: usize = num(next_field(&mut lines, "k")?, "k")?;
        let hyper = Hyperparams {
            lambda1: num(next_field(&mut lines, "lambda1")?, "lambda1")?,
            lambda2: num(next_field(&mut lines, "lambda2")?, "lambda2")?,
            lambda3: num(next_field(&mut lines, "lambda3")?, "lambda3")?,
            k,
            eta: num(next_field(&mut lines, "eta")?, "eta")?,
            max_iter: num(next_field(&mut lines, "max_iter")?, "max_iter")?,
            tol: num(next_field(&mut lines, "tol")?, "tol")?,
            seed: num(next_field(&mut lines, "seed")?, "seed")?,
            backtracking: num(next_field(&mut lines, "backtracking")?, "backtracking")?,
        };
        let fingerprint = next_field(&mut lines, "fingerprint")?;
        let weighting: Weighting = next_field(&mut lines, "weighting")?.parse()?;
        let nv: usize = num(next_field(&mut lines, "vocabulary")?, "vocabulary")?;
        let mut vocab = Vec::with_capacity(nv);
        for _ in 0..nv {
            vocab.push(
                lines
                    .next()
                    .ok_or_else(|| bad("truncated vocabulary".into()))?
                    .to_string(),
            );
        }
        let nf: usize = num(next_field(&mut lines, "features")?, "features")?;
        let mut keys = Vec::with_capacity(nf);
        for _ in 0..nf {
            keys.push(
                lines
                    .next()
                    .ok_or_else(|| bad("truncated feature list".into()))?
                    .to_string(),
            );
        }
        if lines.next() != Some("U") {
            return Err(bad("missing U".into()));
        }
        let u = parse_dense(&mut lines)?;
        if lines.next() != Some("V") {
            return Err(bad("missing V".into()));
        }
        let v = parse_dense(&mut lines)?;

        let vocabulary = Vocabulary::from_tokens(vocab);
        let features = FeatureIndex::from_keys(keys);
        if u.shape() != (dx, k) || v.shape() != (dy, k) || vocabulary.len() != dx || features.len() != dy {
            return Err(bad("matrix shapes disagree with the header or listings".into()));
        }
        Ok(ModelFile {
            u,
            v,
            hyper,
            fingerprint,
            weighting,
            vocabulary,
            features,
        })
    }
}

pub fn write_model(path: &Path, file: &ModelFile) -> Result<()> {
    std::fs::write(path, file.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelFile::from_text(&text)
}

/// Two-column table `iteration<TAB>total`, iteration 0 being the start.
pub fn write_trace(model: &Model) -> String {
    let mut out = String::from("iteration\ttotal\n");
    let _ = writeln!(out, "0\t{:.16e}", model.initial.total);
    for (i, l) in model.trace.iter().enumerate() {
        let _ = writeln!(out, "{}\t{:.16e}", i + 1, l.total);
    }
    out
}
