use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::experiments::MetricsTable;
use crate::kernel::{RunReport, SuResponse};
use crate::protocol::MessageKind;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ExportError> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|source| ExportError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn csv_bytes<I, R>(records: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.write_record(r).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

fn metrics_rows(report: &RunReport) -> Vec<[String; 2]> {
    let mut rows = vec![["metric".to_string(), "value".to_string()]];
    let mut push = |k: String, v: String| rows.push([k, v]);
    push("total_messages".into(), report.msg_counts.total.to_string());
    push("sent_messages".into(), report.sent_messages.to_string());
    for kind in MessageKind::ALL {
        push(format!("messages_{kind}"), report.msg_counts.get(kind).to_string());
    }
    push(
        "run_response".into(),
        report.run_response.map_or_else(|| "none".to_string(), |t| t.to_string()),
    );
    push("quiescent_at".into(), report.quiescent_at.to_string());
    push("events_dispatched".into(), report.event_log.len().to_string());
    push("sus_served".into(), report.served().to_string());
    push(
        "sus_unserved".into(),
        (report.per_su_response.len() - report.served()).to_string(),
    );
    push("protocol_violations".into(), report.violations.len().to_string());
    for (su, response) in &report.per_su_response {
        let value = match response {
            SuResponse::Served(t) => t.to_string(),
            SuResponse::Unserved => "unserved".to_string(),
        };
        push(format!("response:{su}"), value);
    }
    rows
}

/// Writes `metrics.csv`, `events.jsonl` and `allocations.csv` into `dir`
/// (created if missing). Output depends only on the report.
pub fn export_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, ExportError> {
    fs::create_dir_all(dir).map_err(|source| ExportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;

    let metrics = dir.join("metrics.csv");
    write_file(&metrics, &csv_bytes(metrics_rows(report)))?;

    let events = dir.join("events.jsonl");
    let mut jsonl = String::new();
    for e in &report.event_log {
        jsonl.push_str(&serde_json::to_string(e).expect("event serializes"));
        jsonl.push('\n');
    }
    write_file(&events, jsonl.as_bytes())?;

    let allocations = dir.join("allocations.csv");
    let header = ["su_id", "pu_id", "cpu_id", "granted_channels", "price", "alloc_time"].map(String::from);
    let rows = std::iter::once(header.to_vec()).chain(report.allocations.iter().map(|a| {
        vec![
            a.su_id.clone(),
            a.offer.pu_id.clone(),
            a.offer.cpu_id.clone(),
            a.granted_channels.to_string(),
            a.offer.price.to_string(),
            a.offer.alloc_time.to_string(),
        ]
    }));
    write_file(&allocations, &csv_bytes(rows))?;

    Ok(vec![metrics, events, allocations])
}

/// Metrics table as CSV, preceded by `# `-prefixed provenance lines.
pub fn metrics_table_csv(table: &MetricsTable) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", table.title));
    for note in &table.notes {
        out.push_str(&format!("# {note}\n"));
    }
    let mut header: Vec<String> = [
        "configuration",
        "series",
        "swept",
        "su_count",
        "csu_count",
        "total_messages",
        "expected_messages",
        "run_response",
        "sus_served",
    ]
    .map(String::from)
    .to_vec();
    header.extend(MessageKind::ALL.iter().map(|k| format!("messages_{k}")));
    let rows = std::iter::once(header).chain(table.rows.iter().map(|r| {
        let mut rec = vec![
            r.label.clone(),
            r.series.clone(),
            r.swept.to_string(),
            r.su_count.to_string(),
            r.csu_count.to_string(),
            r.total_messages.to_string(),
            r.expected_messages.to_string(),
            r.run_response.map_or_else(|| "none".to_string(), |t| t.to_string()),
            r.served.to_string(),
        ];
        rec.extend(
            MessageKind::ALL
                .iter()
                .map(|k| r.per_kind.get(k).copied().unwrap_or(0).to_string()),
        );
        rec
    }));
    out.push_str(&String::from_utf8(csv_bytes(rows)).expect("csv is utf-8"));
    out
}

pub fn write_metrics_table(table: &MetricsTable, path: &Path) -> Result<(), ExportError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| ExportError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    write_file(path, metrics_table_csv(table).as_bytes())
}
