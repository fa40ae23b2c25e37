//! Plain-text graph and tour formats.
//!
//! Graph: a header line `n m`, then `m` lines `tail head`. Lines starting
//! with `#` and blank lines are skipped. Tour: one line of arc ids.

use super::{DirectedMultigraph, GraphError, Tour};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn two_numbers(line: usize, s: &str) -> Result<(usize, usize), GraphError> {
    let mut it = s.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        it.next()
            .ok_or_else(|| parse_err(line, "expected two integers"))?
            .parse()
            .map_err(|e| parse_err(line, format!("{e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(parse_err(line, "trailing tokens"));
    }
    Ok((a, b))
}

pub fn parse_graph(text: &str) -> Result<DirectedMultigraph, GraphError> {
    let mut lines = data_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
    let (n, m) = two_numbers(line, header)?;
    let mut pairs = Vec::with_capacity(m);
    for (line, l) in lines {
        if pairs.len() == m {
            return Err(parse_err(line, "more arcs than declared"));
        }
        pairs.push(two_numbers(line, l)?);
    }
    if pairs.len() != m {
        return Err(parse_err(0, format!("declared {m} arcs, found {}", pairs.len())));
    }
    DirectedMultigraph::new(n, &pairs)
}

pub fn write_graph(g: &DirectedMultigraph) -> String {
    let mut s = format!("{} {}\n", g.vertex_count(), g.arc_count());
    for a in g.arcs() {
        s.push_str(&format!("{} {}\n", a.tail, a.head));
    }
    s
}

pub fn parse_tour(g: &DirectedMultigraph, text: &str) -> Result<Tour, GraphError> {
    let mut seq = Vec::new();
    for (line, l) in data_lines(text) {
        for tok in l.split_whitespace() {
            seq.push(tok.parse().map_err(|e| parse_err(line, format!("{e}")))?);
        }
    }
    Tour::new(g, seq)
}

pub fn write_tour(t: &Tour) -> String {
    let mut s = t.arcs().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# bidirected pair\n2 2\n0 1\n1 0\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(write_graph(&g), "2 2\n0 1\n1 0\n");
        let t = parse_tour(&g, "1 0\n").unwrap();
        assert_eq!(write_tour(&t), "0 1\n");
    }

    #[test]
    fn malformed() {
        assert!(parse_graph("2 2\n0 1\n").is_err());
        assert!(parse_graph("2 1\n0 x\n").is_err());
        assert!(parse_graph("2 1\n0 1 3\n").is_err());
        assert!(parse_graph("").is_err());
    }
}
