//! Plain-text model persistence.
//!
//! Versioned header, free-form metadata, class list, lambda, vocabulary,
//! then dense weight rows and the bias row as decimal text. Rust's float
//! formatting is shortest-round-trip, so save -> load -> save is
//! byte-identical.

use super::{class_display, LearnError, LogRegModel, TrainMeta};

const HEADER: &str = "ttmchat-model v1";

/// Serialize a model plus the vocabulary it was trained against.
/// `extra_meta` lets callers record context such as the label family.
pub fn save_model(model: &LogRegModel, vocab: &[String], extra_meta: &[(&str, &str)]) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for (key, value) in extra_meta {
        out.push_str(&format!("meta\t{key}\t{value}\n"));
    }
    out.push_str(&format!("lambda\t{}\n", model.lambda));
    out.push_str(&format!("seed\t{}\n", model.meta.seed));
    out.push_str(&format!("iterations\t{}\n", model.meta.iterations));
    out.push_str(&format!("objective\t{}\n", model.meta.final_objective));
    out.push_str("classes");
    for class in &model.classes {
        out.push('\t');
        out.push_str(class_display(class));
    }
    out.push('\n');
    out.push_str("vocab");
    for token in vocab {
        out.push('\t');
        out.push_str(token);
    }
    out.push('\n');
    for c in 0..model.classes.len() {
        out.push_str("weights");
        for j in 0..model.n_features {
            out.push('\t');
            out.push_str(&model.weights[c * model.n_features + j].to_string());
        }
        out.push('\n');
    }
    out.push_str("bias");
    for b in &model.bias {
        out.push('\t');
        out.push_str(&b.to_string());
    }
    out.push('\n');
    out
}

fn bad(line: usize, what: impl Into<String>) -> LearnError {
    LearnError::BadModelFile {
        line,
        what: what.into(),
    }
}

/// Parse a model file back into the model, its vocabulary, and any
/// caller-recorded metadata.
pub fn load_model(
    text: &str,
) -> Result<(LogRegModel, Vec<String>, Vec<(String, String)>), LearnError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    if header != HEADER {
        return Err(bad(1, format!("expected `{HEADER}`")));
    }

    let mut meta = Vec::new();
    let mut lambda = None;
    let mut seed = None;
    let mut iterations = None;
    let mut objective = None;
    let mut classes: Option<Vec<Option<String>>> = None;
    let mut vocab: Option<Vec<String>> = None;
    let mut weight_rows: Vec<Vec<f64>> = Vec::new();
    let mut bias: Option<Vec<f64>> = None;

    for (idx, line) in lines {
        let lineno = idx + 1;
        let mut fields = line.split('\t');
        let key = fields.next().unwrap_or_default();
        match key {
            "meta" => {
                let k = fields.next().ok_or_else(|| bad(lineno, "meta key"))?;
                let v = fields.next().unwrap_or_default();
                meta.push((k.to_string(), v.to_string()));
            }
            "lambda" => lambda = Some(parse_f64(fields.next(), lineno)?),
            "seed" => seed = Some(parse_u64(fields.next(), lineno)?),
            "iterations" => iterations = Some(parse_u64(fields.next(), lineno)? as usize),
            "objective" => objective = Some(parse_f64(fields.next(), lineno)?),
            "classes" => {
                classes = Some(
                    fields
                        .map(|f| {
                            if f == "NULL" {
                                None
                            } else {
                                Some(f.to_string())
                            }
                        })
                        .collect(),
                )
            }
            "vocab" => vocab = Some(fields.map(str::to_string).collect()),
            "weights" => {
                weight_rows.push(
                    fields
                        .map(|f| f.parse::<f64>().map_err(|_| bad(lineno, "bad weight")))
                        .collect::<Result<Vec<f64>, _>>()?,
                );
            }
            "bias" => {
                bias = Some(
                    fields
                        .map(|f| f.parse::<f64>().map_err(|_| bad(lineno, "bad bias")))
                        .collect::<Result<Vec<f64>, _>>()?,
                );
            }
            other => return Err(bad(lineno, format!("unknown section `{other}`"))),
        }
    }

    let classes = classes.ok_or_else(|| bad(0, "missing classes"))?;
    let vocab = vocab.ok_or_else(|| bad(0, "missing vocab"))?;
    let bias = bias.ok_or_else(|| bad(0, "missing bias"))?;
    if weight_rows.len() != classes.len() || bias.len() != classes.len() {
        return Err(bad(0, "weight/bias rows do not match class count"));
    }
    let n_features = vocab.len();
    let mut weights = Vec::with_capacity(classes.len() * n_features);
    for row in &weight_rows {
        if row.len() != n_features {
            return Err(bad(0, "weight row does not match vocabulary size"));
        }
        weights.extend_from_slice(row);
    }

    let model = LogRegModel {
        classes,
        n_features,
        weights,
        bias,
        lambda: lambda.ok_or_else(|| bad(0, "missing lambda"))?,
        meta: TrainMeta {
            seed: seed.ok_or_else(|| bad(0, "missing seed"))?,
            iterations: iterations.ok_or_else(|| bad(0, "missing iterations"))?,
            final_objective: objective.ok_or_else(|| bad(0, "missing objective"))?,
            objective_trace: Vec::new(),
        },
    };
    Ok((model, vocab, meta))
}

fn parse_f64(field: Option<&str>, line: usize) -> Result<f64, LearnError> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| bad(line, "bad float"))
}

fn parse_u64(field: Option<&str>, line: usize) -> Result<u64, LearnError> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| bad(line, "bad integer"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::{train_logreg, EncodedDataset, TrainOptions};
    use crate::features::SparseVector;

    fn trained() -> LogRegModel {
        let data = EncodedDataset {
            n_features: 3,
            classes: vec![None, Some("goal".into()), Some("greeting".into())],
            rows: vec![
                (SparseVector(vec![(0, 1)]), 0),
                (SparseVector(vec![(1, 2)]), 1),
                (SparseVector(vec![(2, 1)]), 2),
                (SparseVector(vec![(0, 1), (2, 1)]), 0),
            ],
        };
        train_logreg(
            &data,
            &TrainOptions {
                lambda: 1e-8,
                seed: 7,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let model = trained();
        let vocab = vec!["lose".to_string(), "weight".to_string(), "hi".to_string()];
        let text = save_model(&model, &vocab, &[("family", "OTHER")]);
        let (loaded, vocab2, meta) = load_model(&text).unwrap();
        assert_eq!(vocab2, vocab);
        assert_eq!(meta, vec![("family".to_string(), "OTHER".to_string())]);
        assert_eq!(loaded.classes, model.classes);
        assert_eq!(loaded.weights, model.weights);
        assert_eq!(loaded.bias, model.bias);
        assert_eq!(loaded.lambda, model.lambda);
        assert_eq!(loaded.meta.seed, model.meta.seed);
        let text2 = save_model(&loaded, &vocab2, &[("family", "OTHER")]);
        assert_eq!(text, text2);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(load_model("").is_err());
        assert!(load_model("not a model\n").is_err());
        let model = trained();
        let vocab = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let text = save_model(&model, &vocab, &[]);
        let truncated: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(load_model(&truncated).is_err());
    }
}
