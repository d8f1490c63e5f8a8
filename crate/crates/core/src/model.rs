//! A fitted network over a subset of the original variables, and its JSON form.
//!
//! ```json
//! {"config": {"input_dim": 2, "hidden_widths": [3], "activation": "relu"},
//!  "weights": [[[...], [...], [...]], [[...]]],
//!  "biases": [[...], [...]],
//!  "index_map": [1, 4]}
//! ```
//!
//! `weights[i]` is layer `i`'s matrix as nested rows; `index_map[k]` is the
//! 1-based original variable feeding input `k`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::net::{self, embed_inputs, prune_inputs, NetworkConfig, NetworkParams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: NetworkConfig,
    pub params: NetworkParams,
    /// 0-based original variable index of each input.
    pub index_map: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    config: NetworkConfig,
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
    index_map: Vec<usize>,
}

impl Model {
    /// Compacts full-width parameters to the selected inputs only.
    pub fn from_full(config: &NetworkConfig, params: &NetworkParams) -> Result<Self> {
        let keep = params.selected();
        let (params, config, index_map) = prune_inputs(config, params, &keep)?;
        Ok(Self {
            config,
            params,
            index_map,
        })
    }

    /// Parameters re-embedded into a `full_dim`-input network.
    pub fn to_full(&self, full_dim: usize) -> Result<NetworkParams> {
        embed_inputs(&self.params, &self.index_map, full_dim)
    }

    /// Width a design matrix needs for this model.
    pub fn required_width(&self) -> usize {
        self.index_map.iter().max().map_or(0, |&m| m + 1)
    }

    /// Scores rows of a full-width design matrix, using only mapped columns.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() < self.required_width() {
            return Err(Error::Dimension(format!(
                "data has {} covariate columns but the model reads variable {}",
                x.cols(),
                self.required_width()
            )));
        }
        net::forward_batch(&self.config, &self.params, &x.select_columns(&self.index_map))
    }

    pub fn to_json<W: Write>(&self, writer: W) -> Result<()> {
        let file = ModelFile {
            config: self.config.clone(),
            weights: self.params.weights.iter().map(Matrix::to_rows).collect(),
            biases: self.params.biases.clone(),
            index_map: self.index_map.iter().map(|j| j + 1).collect(),
        };
        serde_json::to_writer(writer, &file)?;
        Ok(())
    }

    pub fn to_json_value(&self) -> Result<serde_json::Value> {
        let mut buf = Vec::new();
        self.to_json(&mut buf)?;
        Ok(serde_json::from_slice(&buf)?)
    }

    pub fn from_json<R: Read>(reader: R) -> Result<Self> {
        let file: ModelFile = serde_json::from_reader(reader)?;
        Self::from_file(file)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        Self::from_file(serde_json::from_value(value)?)
    }

    fn from_file(file: ModelFile) -> Result<Self> {
        let weights = file
            .weights
            .iter()
            .map(|rows| {
                if rows.is_empty() {
                    Err(Error::InvalidData("weight matrix with no rows".into()))
                } else {
                    Matrix::from_rows(rows)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let params = NetworkParams {
            weights,
            biases: file.biases,
        };
        // An input layer with zero columns serializes as rows of empty arrays.
        params.check_shape(&file.config)?;
        if !params.is_finite() {
            return Err(Error::InvalidData("model contains non-finite parameters".into()));
        }
        if file.index_map.len() != file.config.input_dim {
            return Err(Error::InvalidData(format!(
                "index_map has {} entries for input_dim {}",
                file.index_map.len(),
                file.config.input_dim
            )));
        }
        if file.index_map.contains(&0) {
            return Err(Error::InvalidData("index_map entries are 1-based".into()));
        }
        let index_map: Vec<usize> = file.index_map.iter().map(|j| j - 1).collect();
        let mut sorted = index_map.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != index_map.len() {
            return Err(Error::InvalidData("index_map has duplicate entries".into()));
        }
        Ok(Self {
            config: file.config,
            params,
            index_map,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::init_params;

    fn sparse_model() -> (NetworkConfig, NetworkParams) {
        let cfg = NetworkConfig::new(6, vec![3, 2]);
        let mut p = init_params(&cfg, 1);
        for j in [0, 2, 5] {
            p.weights[0].set_column(j, &[0.0; 3]);
        }
        (cfg, p)
    }

    #[test]
    fn compact_model_predicts_like_full() {
        let (cfg, p) = sparse_model();
        let model = Model::from_full(&cfg, &p).unwrap();
        assert_eq!(model.index_map, vec![1, 3, 4]);
        let x = Matrix::from_rows(&[vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6], vec![-1.0; 6]]).unwrap();
        let full = net::forward_batch(&cfg, &p, &x).unwrap();
        assert_eq!(model.predict(&x).unwrap(), full);
        assert_eq!(model.to_full(6).unwrap(), p);
    }

    #[test]
    fn json_round_trip() {
        let (cfg, p) = sparse_model();
        let model = Model::from_full(&cfg, &p).unwrap();
        let mut buf = Vec::new();
        model.to_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["index_map"], serde_json::json!([2, 4, 5]));
        assert_eq!(v["config"]["activation"], "relu");
        assert_eq!(v["config"]["input_dim"], 3);
        assert_eq!(Model::from_json(buf.as_slice()).unwrap(), model);
    }

    #[test]
    fn empty_model_round_trips() {
        let cfg = NetworkConfig::new(4, vec![2]);
        let mut p = NetworkParams::zeros(&cfg);
        p.biases[1][0] = 0.7;
        let model = Model::from_full(&cfg, &p).unwrap();
        assert!(model.index_map.is_empty());
        let mut buf = Vec::new();
        model.to_json(&mut buf).unwrap();
        let back = Model::from_json(buf.as_slice()).unwrap();
        let x = Matrix::zeros(3, 4);
        assert_eq!(back.predict(&x).unwrap(), vec![0.7; 3]);
    }

    #[test]
    fn rejects_malformed_models() {
        let bad_map = r#"{"config":{"input_dim":1,"hidden_widths":[],"activation":"relu"},
            "weights":[[[1.0]]],"biases":[[0.0]],"index_map":[0]}"#;
        assert!(Model::from_json(bad_map.as_bytes()).is_err());
        let bad_shape = r#"{"config":{"input_dim":2,"hidden_widths":[],"activation":"relu"},
            "weights":[[[1.0]]],"biases":[[0.0]],"index_map":[1,2]}"#;
        assert!(Model::from_json(bad_shape.as_bytes()).is_err());
        let narrow = r#"{"config":{"input_dim":1,"hidden_widths":[],"activation":"relu"},
            "weights":[[[1.0]]],"biases":[[0.0]],"index_map":[5]}"#;
        let m = Model::from_json(narrow.as_bytes()).unwrap();
        let err = m.predict(&Matrix::zeros(2, 3)).unwrap_err();
        assert!(err.to_string().contains("3 covariate columns"));
    }
}
