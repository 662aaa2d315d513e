//! Text formats: graph6 (McKay's format, short form) and a plain edge list.
//!
//! graph6 packs the upper triangle column by column, six bits per printable
//! byte, each byte offset by 63. The edge list format is one header line with
//! the vertex count followed by `i j` or `i j w` lines; the presence of any
//! weight switches the whole file to weighted mode.

use nalgebra::DMatrix;

use super::{Graph, GraphError};

const G6_OFFSET: u8 = 63;
/// Largest order representable by a single header byte.
const G6_SHORT_MAX: usize = 62;

fn g6_err(offset: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Graph6Parse { offset, msg: msg.into() }
}

/// Parses one graph6 line into a simple graph.
pub fn parse_graph6(line: &str) -> Result<Graph, GraphError> {
    let bytes = line.trim_end().as_bytes();
    if bytes.is_empty() {
        return Err(g6_err(0, "empty input"));
    }
    let header = bytes[0];
    if header == 126 {
        return Err(g6_err(0, "long-form order (>62 vertices) not supported"));
    }
    if !(G6_OFFSET..=G6_OFFSET + G6_SHORT_MAX as u8).contains(&header) {
        return Err(g6_err(0, format!("invalid header byte {header}")));
    }
    let m = (header - G6_OFFSET) as usize;
    if m == 0 {
        return Err(g6_err(0, "graph of order 0"));
    }

    let nbits = m * (m - 1) / 2;
    let nbytes = nbits.div_ceil(6);
    if bytes.len() != 1 + nbytes {
        return Err(g6_err(
            bytes.len().min(1 + nbytes),
            format!("expected {} data bytes, found {}", nbytes, bytes.len() - 1),
        ));
    }

    let mut bits = Vec::with_capacity(nbytes * 6);
    for (pos, &b) in bytes[1..].iter().enumerate() {
        if !(G6_OFFSET..=G6_OFFSET + 63).contains(&b) {
            return Err(g6_err(pos + 1, format!("invalid data byte {b}")));
        }
        let v = b - G6_OFFSET;
        for shift in (0..6).rev() {
            bits.push((v >> shift) & 1 == 1);
        }
    }
    for (extra, &bit) in bits[nbits..].iter().enumerate() {
        if bit {
            return Err(g6_err(1 + (nbits + extra) / 6, "nonzero padding bit"));
        }
    }

    let mut a = DMatrix::zeros(m, m);
    let mut k = 0;
    for j in 1..m {
        for i in 0..j {
            if bits[k] {
                a[(i, j)] = 1.0;
                a[(j, i)] = 1.0;
            }
            k += 1;
        }
    }
    Graph::from_adjacency(a)
}

/// Encodes a simple graph as one graph6 line (no trailing newline).
pub fn emit_graph6(g: &Graph) -> Result<String, GraphError> {
    let m = g.order();
    if m > G6_SHORT_MAX {
        return Err(GraphError::SizeGuard(format!(
            "graph6 short form holds at most {G6_SHORT_MAX} vertices, got {m}"
        )));
    }
    if !g.is_binary_simple() {
        return Err(GraphError::InvalidGraph(
            "graph6 encodes simple unweighted graphs only".into(),
        ));
    }
    let a = g.adjacency();
    let mut bits = Vec::with_capacity(m * (m - 1) / 2);
    for j in 1..m {
        for i in 0..j {
            bits.push(a[(i, j)] != 0.0);
        }
    }
    let mut out = vec![G6_OFFSET + m as u8];
    for chunk in bits.chunks(6) {
        let mut v = 0u8;
        for (t, &bit) in chunk.iter().enumerate() {
            if bit {
                v |= 1 << (5 - t);
            }
        }
        out.push(G6_OFFSET + v);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are printable ASCII"))
}

/// Parses the edge list format. Simple mode (no weight column) collapses
/// duplicate edges and rejects self-loops; weighted mode is last-write-wins.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let el_err = |line: usize, msg: &str| GraphError::EdgeListParse { line, msg: msg.into() };

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| el_err(1, "missing header line"))?;
    let m: usize = header
        .parse()
        .map_err(|_| el_err(hline, "header must be the vertex count"))?;
    if m == 0 {
        return Err(el_err(hline, "order must be at least 1"));
    }

    // (line, i, j, weight)
    let mut parsed: Vec<(usize, usize, usize, Option<f64>)> = Vec::new();
    for (n, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(el_err(n, "expected `i j` or `i j w`"));
        }
        let i: usize = fields[0].parse().map_err(|_| el_err(n, "bad vertex index"))?;
        let j: usize = fields[1].parse().map_err(|_| el_err(n, "bad vertex index"))?;
        if i >= m || j >= m {
            return Err(el_err(n, "vertex index out of range"));
        }
        let w = match fields.get(2) {
            Some(f) => {
                let w: f64 = f.parse().map_err(|_| el_err(n, "bad weight"))?;
                if !w.is_finite() {
                    return Err(el_err(n, "weight must be finite"));
                }
                Some(w)
            }
            None => None,
        };
        parsed.push((n, i, j, w));
    }

    let weighted = parsed.iter().any(|&(_, _, _, w)| w.is_some());
    let mut a = DMatrix::zeros(m, m);
    for (n, i, j, w) in parsed {
        if i == j && !weighted {
            return Err(el_err(n, "self-loop in a simple (unweighted) edge list"));
        }
        let w = w.unwrap_or(1.0);
        a[(i, j)] = w;
        a[(j, i)] = w;
    }
    Graph::from_adjacency(a)
}

/// Renders a graph in the edge list format; weights are emitted only when the
/// graph is not binary simple.
pub fn emit_edge_list(g: &Graph) -> String {
    let m = g.order();
    let weighted = !g.is_binary_simple();
    let mut out = format!("{m}\n");
    let a = g.adjacency();
    for i in 0..m {
        for j in i..m {
            if a[(i, j)] != 0.0 {
                if weighted {
                    out.push_str(&format!("{} {} {}\n", i, j, a[(i, j)]));
                } else {
                    out.push_str(&format!("{} {}\n", i, j));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // "D?{" = order 5, bit stream 000000 111100: edges to vertex 4 only.
    #[test]
    fn parses_star_on_five_vertices() {
        let g = parse_graph6("D?{").unwrap();
        assert_eq!(g.order(), 5);
        let mut edges = vec![];
        for i in 0..5 {
            for j in (i + 1)..5 {
                if g.adjacency()[(i, j)] != 0.0 {
                    edges.push((i, j));
                }
            }
        }
        assert_eq!(edges, vec![(0, 4), (1, 4), (2, 4), (3, 4)]);
    }

    #[test]
    fn parses_single_edge_and_single_vertex() {
        let g = parse_graph6("A_").unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.adjacency()[(0, 1)], 1.0);

        let g = parse_graph6("@").unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn rejects_malformed_graph6() {
        assert!(parse_graph6("").is_err());
        assert!(parse_graph6("?").is_err(), "order 0");
        assert!(parse_graph6("~??").is_err(), "long form");
        // order 5 wants exactly 2 data bytes
        assert!(parse_graph6("D?").is_err());
        assert!(parse_graph6("D?{{").is_err());
        // order 2 wants 1 bit; byte value 16 sets a padding bit
        let bad = String::from_utf8(vec![65, 63 + 16]).unwrap();
        match parse_graph6(&bad) {
            Err(GraphError::Graph6Parse { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("expected padding error, got {other:?}"),
        }
        // data byte below the printable offset
        let bad = String::from_utf8(vec![65, 32]).unwrap();
        assert!(parse_graph6(&bad).is_err());
    }

    #[test]
    fn graph6_round_trip() {
        for line in ["@", "A_", "A?", "D?{", "Bw", "C~", "DQc"] {
            let g = parse_graph6(line).unwrap();
            assert_eq!(emit_graph6(&g).unwrap(), line);
        }
    }

    #[test]
    fn emit_rejects_weighted() {
        let g = Graph::from_weighted_edges(2, &[(0, 1, 0.5)]).unwrap();
        assert!(emit_graph6(&g).is_err());
    }

    #[test]
    fn parses_simple_edge_list() {
        let g = parse_edge_list("3\n0 1\n1 2\n").unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.is_binary_simple());
        // duplicates collapse
        let g = parse_edge_list("2\n0 1\n1 0\n0 1\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn parses_weighted_edge_list() {
        let g = parse_edge_list("2\n0 1 0.5\n").unwrap();
        assert_eq!(g.adjacency()[(0, 1)], 0.5);
        // last write wins in weighted mode
        let g = parse_edge_list("2\n0 1 0.5\n0 1 -2\n").unwrap();
        assert_eq!(g.adjacency()[(0, 1)], -2.0);
        // self-loops only with weights
        assert!(parse_edge_list("2\n0 0\n").is_err());
        let g = parse_edge_list("2\n0 0 1.5\n0 1 1\n").unwrap();
        assert_eq!(g.adjacency()[(0, 0)], 1.5);
    }

    #[test]
    fn rejects_bad_edge_lists() {
        assert!(parse_edge_list("").is_err());
        assert!(parse_edge_list("0\n").is_err());
        assert!(parse_edge_list("2\n0 5\n").is_err());
        assert!(parse_edge_list("2\n0\n").is_err());
        assert!(parse_edge_list("2\n0 1 x\n").is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_weighted_edges(3, &[(0, 1, 0.25), (1, 1, -1.0)]).unwrap();
        let text = emit_edge_list(&g);
        let back = parse_edge_list(&text).unwrap();
        assert_eq!(g.adjacency(), back.adjacency());
    }
}
