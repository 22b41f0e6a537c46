//! Reading a graph from QGF text, analysing it, and writing it back.

use qgr::cli::{analyze_graph, AnalyzeOptions, GraphInput};
use qgr::qgf::{graph_to_qgf, parse_qgf};

const TEXT: &str = "\
# a star: two Dirichlet edges and two leads at a Kirchhoff vertex
graph star
vertex c
vertex d1
vertex d2
edge e1 c d1 length 1/2
edge e2 c d2 length 1/2
lead f1 c
lead f2 c
couple c kirchhoff
couple d1 robin 0
couple d2 robin 0
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = parse_qgf(TEXT)?;
    let graph = doc.to_graph()?;
    print!("{}", graph_to_qgf(&graph)?);
    let input = GraphInput::from_qgf(TEXT, "star.qgf")?;
    let report = analyze_graph(&input, &AnalyzeOptions::default())?;
    print!("{}", report.to_text());
    Ok(())
}
