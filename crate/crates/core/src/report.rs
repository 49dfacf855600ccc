//! Uniform report format shared by every verification suite.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// Symbolic residual forms or a measured numeric error.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Residual {
    Forms(Vec<String>),
    Number(f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct Item {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Item {
    pub fn new(id: impl Into<String>, ok: bool) -> Item {
        Item {
            id: id.into(),
            status: Status::from_bool(ok),
            kappa: None,
            residual: None,
            relations: None,
            computed: None,
            expected: None,
            detail: None,
        }
    }

    pub fn kappa(mut self, k: Vec<String>) -> Item {
        self.kappa = Some(k);
        self
    }

    pub fn residual(mut self, r: Residual) -> Item {
        self.residual = Some(r);
        self
    }

    pub fn relations(mut self, r: Vec<String>) -> Item {
        self.relations = Some(r);
        self
    }

    pub fn computed(mut self, c: impl Into<String>) -> Item {
        self.computed = Some(c.into());
        self
    }

    pub fn expected(mut self, e: impl Into<String>) -> Item {
        self.expected = Some(e.into());
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Item {
        self.detail = Some(d.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub items: Vec<Item>,
    /// SHA-256 of the data files the suite was driven by, or of the item
    /// list when the suite reads no data file.
    pub checksum: String,
}

pub fn sha256_hex(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

impl Report {
    /// Report keyed to the given data files.
    pub fn with_data(suite: impl Into<String>, items: Vec<Item>, data: &[&str]) -> Report {
        Report {
            suite: suite.into(),
            items,
            checksum: sha256_hex(data),
        }
    }

    /// Report whose checksum covers its own items.
    pub fn self_keyed(suite: impl Into<String>, items: Vec<Item>) -> Report {
        let body = serde_json::to_string(&items).expect("items serialize");
        Report {
            suite: suite.into(),
            checksum: sha256_hex(&[&body]),
            items,
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(Item::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|i| !i.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.suite);
        for it in &self.items {
            out.push_str(&format!("[{}] {}", it.status.as_str(), it.id));
            if let Some(k) = &it.kappa {
                out.push_str(&format!("  kappa: {}", k.join(", ")));
            }
            if let Some(Residual::Number(x)) = &it.residual {
                out.push_str(&format!("  residual: {x:.3e}"));
            }
            out.push('\n');
            if let Some(c) = &it.computed {
                out.push_str(&format!("    computed: {c}\n"));
            }
            if let Some(e) = &it.expected {
                out.push_str(&format!("    expected: {e}\n"));
            }
            if let Some(Residual::Forms(fs)) = &it.residual {
                for f in fs {
                    out.push_str(&format!("    residual: {f} = 0\n"));
                }
            }
            if let Some(rs) = &it.relations {
                for r in rs {
                    out.push_str(&format!("    {r}\n"));
                }
            }
            if let Some(d) = &it.detail {
                for line in d.lines() {
                    out.push_str(&format!("    {line}\n"));
                }
            }
        }
        let passed = self.items.iter().filter(|i| i.passed()).count();
        out.push_str(&format!(
            "{} / {} passed  checksum {}\n",
            passed,
            self.items.len(),
            self.checksum
        ));
        out
    }
}

/// One CSV table for several reports.
pub fn to_csv(reports: &[Report]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "id", "status", "computed", "expected", "kappa"])
        .expect("in-memory write");
    for r in reports {
        for it in &r.items {
            w.write_record([
                r.suite.as_str(),
                it.id.as_str(),
                it.status.as_str(),
                it.computed.as_deref().unwrap_or(""),
                it.expected.as_deref().unwrap_or(""),
                &it.kappa.as_ref().map(|k| k.join("; ")).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_omits_absent_fields() {
        let r = Report::self_keyed("demo", vec![Item::new("a", true)]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["items"][0], serde_json::json!({"id": "a", "status": "pass"}));
        assert_eq!(v["checksum"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn csv_quotes_fields() {
        let it = Item::new("T1.1", false).computed("a, b").expected("c");
        let s = to_csv(&[Report::self_keyed("t", vec![it])]);
        assert!(s.contains("\"a, b\""));
        assert!(s.lines().nth(1).unwrap().starts_with("t,T1.1,fail"));
    }

    #[test]
    fn sha_matches_known_vector() {
        assert_eq!(
            sha256_hex(&["abc"]),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
