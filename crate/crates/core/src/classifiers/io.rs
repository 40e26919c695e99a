//! Versioned text serialization of trained models.
//!
//! Layout: a `creepwave-model v1` magic line, a `kind = <name>` tag, then
//! kind-specific records. Floats use Rust's shortest round-trip formatting,
//! so save-then-load reproduces a model exactly.

use super::{
    gnb::GnbModel,
    knn::KnnModel,
    svm::{BinarySvm, SvmModel, SvmParams},
    tree::{TreeModel, TreeNode},
    ClassifierError, DtwTemplates, TrainedClassifier,
};
use crate::signal::ActivityLabel;
use std::fmt::Write as _;
use std::path::Path;

pub const MODEL_MAGIC: &str = "creepwave-model v1";

pub fn save_model(path: &Path, model: &TrainedClassifier) -> Result<(), ClassifierError> {
    std::fs::write(path, render_model(model)).map_err(|e| ClassifierError::ModelIo(e.to_string()))
}

pub fn load_model(path: &Path) -> Result<TrainedClassifier, ClassifierError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| ClassifierError::ModelIo(e.to_string()))?;
    parse_model(&text, &path.display().to_string())
}

fn join_floats(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn join_labels(labels: &[ActivityLabel]) -> String {
    labels.iter().map(|l| l.name()).collect::<Vec<_>>().join(",")
}

pub fn render_model(model: &TrainedClassifier) -> String {
    let mut out = format!("{MODEL_MAGIC}\nkind = {}\n", model.kind().name());
    match model {
        TrainedClassifier::Svm(m) => {
            let _ = writeln!(out, "dim = {}", m.dim);
            let _ = writeln!(out, "c = {}", m.params.c);
            let _ = writeln!(out, "kernel_degree = {}", m.params.kernel_degree);
            let _ = writeln!(out, "kernel_offset = {}", m.params.kernel_offset);
            let _ = writeln!(out, "tolerance = {}", m.params.tolerance);
            let _ = writeln!(out, "max_pair_updates = {}", m.params.max_pair_updates);
            let _ = writeln!(out, "classes = {}", join_labels(&m.classes));
            for b in &m.binaries {
                let _ = writeln!(out, "binary = {},{}", b.positive.name(), b.negative.name());
                let _ = writeln!(out, "bias = {}", b.bias);
                for (sv, coef) in b.support_vectors.iter().zip(&b.dual_signed) {
                    let _ = writeln!(out, "sv = {} {}", coef, join_floats(sv));
                }
            }
        }
        TrainedClassifier::Knn(m) => {
            let _ = writeln!(out, "k = {}", m.k);
            for (row, label) in m.rows.iter().zip(&m.labels) {
                let _ = writeln!(out, "row = {} {}", label.name(), join_floats(row));
            }
        }
        TrainedClassifier::Gnb(m) => {
            for (ci, class) in m.classes.iter().enumerate() {
                let _ = writeln!(out, "class = {}", class.name());
                let _ = writeln!(out, "prior = {}", m.priors[ci]);
                let _ = writeln!(out, "means = {}", join_floats(&m.means[ci]));
                let _ = writeln!(out, "vars = {}", join_floats(&m.variances[ci]));
            }
        }
        TrainedClassifier::Tree(m) => {
            let _ = writeln!(out, "splits = {}", m.split_count);
            for node in &m.nodes {
                match node {
                    TreeNode::Split { feature, threshold, left, right } => {
                        let _ = writeln!(out, "node = split {feature} {threshold} {left} {right}");
                    }
                    TreeNode::Leaf { counts, prediction } => {
                        let counts =
                            counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
                        let _ = writeln!(out, "node = leaf {} {}", prediction.name(), counts);
                    }
                }
            }
        }
        TrainedClassifier::Dtw(m) => {
            let _ = writeln!(out, "classes = {}", join_labels(&m.classes));
            for (label, series) in &m.templates {
                let _ = writeln!(out, "template = {} {}", label.name(), join_floats(series));
            }
        }
    }
    out
}

struct Parser<'a> {
    path: &'a str,
    lines: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, line: usize, message: String) -> ClassifierError {
        ClassifierError::ModelParse { path: self.path.to_string(), line, message }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.lines.get(self.at).copied();
        self.at += item.is_some() as usize;
        item
    }

    fn peek_key(&self) -> Option<&'a str> {
        self.lines.get(self.at).and_then(|(_, l)| l.split_once('=')).map(|(k, _)| k.trim())
    }

    /// Consume a `key = value` line with the expected key.
    fn expect(&mut self, key: &str) -> Result<(usize, &'a str), ClassifierError> {
        match self.next() {
            Some((n, line)) => {
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| self.err(n, format!("expected {key} = ..., found {line:?}")))?;
                if k.trim() != key {
                    return Err(self.err(n, format!("expected key {key:?}, found {:?}", k.trim())));
                }
                Ok((n, v.trim()))
            }
            None => Err(self.err(0, format!("unexpected end of file, wanted {key}"))),
        }
    }
}

fn parse_f64(p: &Parser<'_>, n: usize, raw: &str) -> Result<f64, ClassifierError> {
    raw.parse::<f64>().map_err(|_| p.err(n, format!("bad float {raw:?}")))
}

fn parse_floats(p: &Parser<'_>, n: usize, raw: &str) -> Result<Vec<f64>, ClassifierError> {
    raw.split_whitespace().map(|t| parse_f64(p, n, t)).collect()
}

fn parse_label(p: &Parser<'_>, n: usize, raw: &str) -> Result<ActivityLabel, ClassifierError> {
    ActivityLabel::parse(raw).map_err(|_| p.err(n, format!("unknown class {raw:?}")))
}

fn parse_labels(p: &Parser<'_>, n: usize, raw: &str) -> Result<Vec<ActivityLabel>, ClassifierError> {
    raw.split(',').map(|t| parse_label(p, n, t.trim())).collect()
}

pub fn parse_model(text: &str, path: &str) -> Result<TrainedClassifier, ClassifierError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let mut p = Parser { path, lines, at: 0 };

    match p.next() {
        Some((_, line)) if line == MODEL_MAGIC => {}
        Some((n, line)) => {
            return Err(p.err(n, format!("expected {MODEL_MAGIC:?}, found {line:?}")))
        }
        None => return Err(p.err(0, "empty model file".into())),
    }
    let (kind_line, kind) = p.expect("kind")?;
    match kind {
        "svm" => parse_svm(&mut p),
        "knn" => parse_knn(&mut p),
        "gnb" => parse_gnb(&mut p),
        "tree" => parse_tree(&mut p),
        "dtw" => parse_dtw(&mut p),
        other => Err(p.err(kind_line, format!("unknown model kind {other:?}"))),
    }
}

fn parse_svm(p: &mut Parser<'_>) -> Result<TrainedClassifier, ClassifierError> {
    let (n, v) = p.expect("dim")?;
    let dim = v.parse::<usize>().map_err(|_| p.err(n, format!("bad dim {v:?}")))?;
    let (n, v) = p.expect("c")?;
    let c = parse_f64(p, n, v)?;
    let (n, v) = p.expect("kernel_degree")?;
    let kernel_degree = v.parse::<u32>().map_err(|_| p.err(n, format!("bad degree {v:?}")))?;
    let (n, v) = p.expect("kernel_offset")?;
    let kernel_offset = parse_f64(p, n, v)?;
    let (n, v) = p.expect("tolerance")?;
    let tolerance = parse_f64(p, n, v)?;
    let (n, v) = p.expect("max_pair_updates")?;
    let max_pair_updates =
        v.parse::<usize>().map_err(|_| p.err(n, format!("bad update cap {v:?}")))?;
    let (n, v) = p.expect("classes")?;
    let classes = parse_labels(p, n, v)?;

    let mut binaries = Vec::new();
    while p.peek_key() == Some("binary") {
        let (n, v) = p.expect("binary")?;
        let (pos, neg) = v
            .split_once(',')
            .ok_or_else(|| p.err(n, format!("expected two classes, found {v:?}")))?;
        let positive = parse_label(p, n, pos.trim())?;
        let negative = parse_label(p, n, neg.trim())?;
        let (n, v) = p.expect("bias")?;
        let bias = parse_f64(p, n, v)?;
        let mut support_vectors = Vec::new();
        let mut dual_signed = Vec::new();
        while p.peek_key() == Some("sv") {
            let (n, v) = p.expect("sv")?;
            let values = parse_floats(p, n, v)?;
            if values.len() != dim + 1 {
                return Err(p.err(n, format!("sv needs 1+{dim} values, found {}", values.len())));
            }
            dual_signed.push(values[0]);
            support_vectors.push(values[1..].to_vec());
        }
        binaries.push(BinarySvm { positive, negative, support_vectors, dual_signed, bias });
    }
    Ok(TrainedClassifier::Svm(SvmModel {
        params: SvmParams { c, kernel_degree, kernel_offset, tolerance, max_pair_updates },
        classes,
        binaries,
        dim,
    }))
}

fn parse_knn(p: &mut Parser<'_>) -> Result<TrainedClassifier, ClassifierError> {
    let (n, v) = p.expect("k")?;
    let k = v.parse::<usize>().map_err(|_| p.err(n, format!("bad k {v:?}")))?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    while p.peek_key() == Some("row") {
        let (n, v) = p.expect("row")?;
        let (label, rest) = v
            .split_once(' ')
            .ok_or_else(|| p.err(n, "row needs a label and values".into()))?;
        labels.push(parse_label(p, n, label)?);
        rows.push(parse_floats(p, n, rest)?);
    }
    if rows.is_empty() {
        return Err(p.err(0, "knn model without training rows".into()));
    }
    Ok(TrainedClassifier::Knn(KnnModel { rows, labels, k }))
}

fn parse_gnb(p: &mut Parser<'_>) -> Result<TrainedClassifier, ClassifierError> {
    let mut classes = Vec::new();
    let mut priors = Vec::new();
    let mut means = Vec::new();
    let mut variances = Vec::new();
    while p.peek_key() == Some("class") {
        let (n, v) = p.expect("class")?;
        classes.push(parse_label(p, n, v)?);
        let (n, v) = p.expect("prior")?;
        priors.push(parse_f64(p, n, v)?);
        let (n, v) = p.expect("means")?;
        means.push(parse_floats(p, n, v)?);
        let (n, v) = p.expect("vars")?;
        variances.push(parse_floats(p, n, v)?);
    }
    if classes.len() < 2 {
        return Err(p.err(0, format!("gnb model needs at least 2 classes, found {}", classes.len())));
    }
    Ok(TrainedClassifier::Gnb(GnbModel { classes, priors, means, variances }))
}

fn parse_tree(p: &mut Parser<'_>) -> Result<TrainedClassifier, ClassifierError> {
    let (n, v) = p.expect("splits")?;
    let split_count = v.parse::<usize>().map_err(|_| p.err(n, format!("bad splits {v:?}")))?;
    let mut nodes = Vec::new();
    while p.peek_key() == Some("node") {
        let (n, v) = p.expect("node")?;
        let tokens: Vec<&str> = v.split_whitespace().collect();
        match tokens.first() {
            Some(&"split") if tokens.len() == 5 => {
                let parse_usize = |raw: &str| {
                    raw.parse::<usize>().map_err(|_| p.err(n, format!("bad index {raw:?}")))
                };
                nodes.push(TreeNode::Split {
                    feature: parse_usize(tokens[1])?,
                    threshold: parse_f64(p, n, tokens[2])?,
                    left: parse_usize(tokens[3])?,
                    right: parse_usize(tokens[4])?,
                });
            }
            Some(&"leaf") if tokens.len() == 8 => {
                let prediction = parse_label(p, n, tokens[1])?;
                let mut counts = [0usize; 6];
                for (slot, raw) in counts.iter_mut().zip(&tokens[2..]) {
                    *slot =
                        raw.parse::<usize>().map_err(|_| p.err(n, format!("bad count {raw:?}")))?;
                }
                nodes.push(TreeNode::Leaf { counts, prediction });
            }
            _ => return Err(p.err(n, format!("bad node record {v:?}"))),
        }
    }
    if nodes.is_empty() {
        return Err(p.err(0, "tree model without nodes".into()));
    }
    Ok(TrainedClassifier::Tree(TreeModel { nodes, split_count }))
}

fn parse_dtw(p: &mut Parser<'_>) -> Result<TrainedClassifier, ClassifierError> {
    let (n, v) = p.expect("classes")?;
    let classes = parse_labels(p, n, v)?;
    let mut templates = Vec::new();
    while p.peek_key() == Some("template") {
        let (n, v) = p.expect("template")?;
        let (label, rest) = v
            .split_once(' ')
            .ok_or_else(|| p.err(n, "template needs a label and values".into()))?;
        templates.push((parse_label(p, n, label)?, parse_floats(p, n, rest)?));
    }
    Ok(TrainedClassifier::Dtw(DtwTemplates::new(templates, &classes)?))
}
