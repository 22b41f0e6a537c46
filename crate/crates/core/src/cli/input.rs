use std::fs;

use super::{CliError, GraphArgs};
use crate::gallery::{make_example, ExampleSpec};
use crate::graph::MetricGraph;
use crate::qgf::parse_qgf;

/// A graph together with where it came from.
#[derive(Clone, Debug)]
pub struct GraphInput {
    pub graph: MetricGraph,
    /// File path or canonical example string, echoed in outputs.
    pub source: String,
    pub example: Option<ExampleSpec>,
}

impl GraphInput {
    pub fn from_example(spec: ExampleSpec) -> Result<Self, CliError> {
        let graph = make_example(&spec)?;
        Ok(Self {
            graph,
            source: format!("example {spec}"),
            example: Some(spec),
        })
    }

    pub fn from_qgf(text: &str, source: &str) -> Result<Self, CliError> {
        let graph = parse_qgf(text)
            .and_then(|d| d.to_graph())
            .map_err(|e| match CliError::from(e) {
                CliError::Parse(m) => CliError::Parse(format!("{source}: {m}")),
                CliError::Model(m) => CliError::Model(format!("{source}: {m}")),
                other => other,
            })?;
        Ok(Self {
            graph,
            source: format!("file {source}"),
            example: None,
        })
    }
}

pub fn load_input(args: &GraphArgs) -> Result<GraphInput, CliError> {
    match (&args.file, &args.example) {
        (_, Some(e)) => GraphInput::from_example(e.parse()?),
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
            GraphInput::from_qgf(&text, &path.display().to_string())
        }
        (None, None) => Err(CliError::Parse("give a QGF file or --example".into())),
    }
}
