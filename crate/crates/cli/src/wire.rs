//! The line protocol between the adversary and an external oracle:
//! `Q <word>` asks, `A <word>` answers, `V <tag> <payload>` closes.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use baire_chromatic::adversary::{Builtin, Oracle};
use baire_chromatic::seq::{fmt_word, parse_word, FinSeq};

pub struct ProcessOracle {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl ProcessOracle {
    pub fn spawn(cmd: &str) -> Result<ProcessOracle, String> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(cmd)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| format!("cannot start oracle {cmd:?}: {e}"))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(ProcessOracle {
            child,
            stdin,
            stdout,
        })
    }

    /// Sends the verdict line and waits for the oracle to exit.
    pub fn finish(mut self, tag: &str, payload: &str) {
        let _ = writeln!(self.stdin, "V {tag} {payload}");
        let _ = self.stdin.flush();
        drop(self.stdin);
        let _ = self.child.wait();
    }
}

impl Oracle for ProcessOracle {
    fn reply(&mut self, w: &[u64]) -> Result<FinSeq, String> {
        writeln!(self.stdin, "Q {}", fmt_word(w)).map_err(|e| e.to_string())?;
        self.stdin.flush().map_err(|e| e.to_string())?;
        let mut line = String::new();
        let n = self
            .stdout
            .read_line(&mut line)
            .map_err(|e| e.to_string())?;
        if n == 0 {
            return Err("oracle closed its output".into());
        }
        let body = line
            .trim_end()
            .strip_prefix("A ")
            .ok_or_else(|| format!("expected `A <word>`, got {:?}", line.trim_end()))?;
        parse_word(body).map_err(|e| e.to_string())
    }
}

/// Answers `Q` lines with a builtin oracle until a `V` line or end of input.
pub fn serve(
    b: Builtin,
    input: impl BufRead,
    mut out: impl Write,
) -> Result<Option<String>, String> {
    for line in input.lines() {
        let line = line.map_err(|e| e.to_string())?;
        let line = line.trim();
        if let Some(w) = line.strip_prefix("Q ") {
            let w = parse_word(w).map_err(|e| e.to_string())?;
            writeln!(out, "A {}", fmt_word(&b.answer(&w))).map_err(|e| e.to_string())?;
            out.flush().map_err(|e| e.to_string())?;
        } else if let Some(v) = line.strip_prefix("V ") {
            return Ok(Some(v.to_string()));
        } else if !line.is_empty() {
            return Err(format!("unexpected line {line:?}"));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serves_until_verdict() {
        let input = b"Q [1,2]\nQ []\nV Diagonalized x\nQ [3]\n";
        let mut out = Vec::new();
        let v = serve(Builtin::PrependZero, &input[..], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "A [0,1,2]\nA [0]\n");
        assert_eq!(v.as_deref(), Some("Diagonalized x"));
        assert!(serve(Builtin::Identity, &b"hello\n"[..], Vec::new()).is_err());
    }
}
