use pathmorse::bench::BenchRecord;
use pathmorse::homology::{ChainComplexReport, Mode};

fn list(xs: &[usize]) -> String {
    xs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn report(r: &ChainComplexReport) -> String {
    let mode = match r.mode {
        Mode::Direct => "direct",
        Mode::Morse => "morse",
        Mode::Both => "both",
    };
    let mut out = format!(
        "mode: {mode}\ncoefficients: {}\nmax dim: {} (complex built through {})\n",
        r.coeffs, r.max_dim, r.complex_top
    );
    let label = if r.mode == Mode::Morse { "" } else { "direct " };
    out.push_str(&format!("{label}dims: {}\n", list(&r.dims)));
    out.push_str(&format!("{label}ranks: {}\n", list(&r.ranks)));
    out.push_str(&format!("{label}betti: {}\n", list(&r.betti)));
    if let (Some(d), Some(k), Some(b)) = (&r.morse_dims, &r.morse_ranks, &r.morse_betti) {
        out.push_str(&format!("morse dims: {}\n", list(d)));
        out.push_str(&format!("morse ranks: {}\n", list(k)));
        out.push_str(&format!("morse betti: {}\n", list(b)));
    }
    if let Some(t) = &r.torsion {
        for (n, ts) in t.iter().enumerate().filter(|(_, ts)| !ts.is_empty()) {
            out.push_str(&format!("torsion H_{n}: {}\n", ts.join(" ")));
        }
    }
    if let Some(inv) = r.invariance {
        out.push_str(&format!("invariance: {inv}\n"));
    }
    if let Some(a) = r.agreement {
        out.push_str(&format!("agreement: {a}\n"));
    }
    if !r.morse_basis.is_empty() {
        out.push_str("morse basis:\n");
        for (n, b) in r.morse_basis.iter().enumerate() {
            out.push_str(&format!("  {n}: {}\n", b.join(", ")));
        }
    }
    for w in &r.invariance_witnesses {
        out.push_str(&format!("witness: {w}\n"));
    }
    for w in &r.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}

/// Labelled matrix, one row per line.
pub fn matrix(rows: &[String], cols: &[String], entries: &[Vec<String>]) -> String {
    let width = entries
        .iter()
        .flatten()
        .map(String::len)
        .chain(cols.iter().map(String::len))
        .max()
        .unwrap_or(1);
    let lead = rows.iter().map(String::len).max().unwrap_or(0);
    let mut out = format!("{:lead$} ", "");
    for c in cols {
        out.push_str(&format!(" {c:>width$}"));
    }
    out.push('\n');
    for (r, row) in rows.iter().zip(entries) {
        out.push_str(&format!("{r:lead$} "));
        for x in row {
            out.push_str(&format!(" {x:>width$}"));
        }
        out.push('\n');
    }
    out
}

pub fn bench_record(r: &BenchRecord) -> String {
    let status = match &r.error {
        Some(e) => format!("error: {e}"),
        None => format!(
            "Ω {} -> M {} invariance {} agreement {}",
            r.omega_total(),
            r.morse_total(),
            r.invariance.unwrap_or(false),
            r.agreement.unwrap_or(false)
        ),
    };
    format!(
        "trial {:>3}: |V|={} |E|={} |E(closure)|={} zero={} {status} ({:.2} ms / {:.2} ms)\n",
        r.id,
        r.vertices,
        r.edges,
        r.closure_edges,
        r.zero.as_deref().unwrap_or("-"),
        r.direct_ms,
        r.morse_ms
    )
}
