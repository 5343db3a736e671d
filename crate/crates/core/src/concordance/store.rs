use std::fs;
use std::path::{Path, PathBuf};

use super::session::{validate_session_id, Session};
use crate::error::{invalid, Result};

/// Sessions persisted as `<dir>/<session_id>.json`.
#[derive(Debug, Clone)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(SessionStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> Result<PathBuf> {
        validate_session_id(id)?;
        Ok(self.dir.join(format!("{id}.json")))
    }

    /// Write-then-rename so a crash never leaves a torn file.
    pub fn save(&self, session: &Session) -> Result<()> {
        let path = self.path(&session.session_id)?;
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, session.to_json()?)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn load(&self, id: &str) -> Result<Session> {
        let path = self.path(id)?;
        if !path.exists() {
            return Err(invalid(format!("no session {id}")));
        }
        let s = Session::from_json(&fs::read_to_string(path)?)?;
        if s.session_id != id {
            return Err(invalid(format!("session file {id} holds {}", s.session_id)));
        }
        Ok(s)
    }

    pub fn exists(&self, id: &str) -> bool {
        self.path(id).map(|p| p.exists()).unwrap_or(false)
    }

    pub fn delete(&self, id: &str) -> Result<()> {
        Ok(fs::remove_file(self.path(id)?)?)
    }

    pub fn list(&self) -> Result<Vec<String>> {
        let mut ids: Vec<String> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                name.strip_suffix(".json").map(str::to_string)
            })
            .filter(|id| validate_session_id(id).is_ok())
            .collect();
        ids.sort();
        Ok(ids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concordance::session::tests::tiny;
    use crate::concordance::session::Provenance;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let c = tiny();
        let mut s = Session::new("alpha", &c).unwrap();
        s.create_list(&c, "k").unwrap();
        s.add_keyword(&c, "k", "吃", Provenance::Seed).unwrap();
        store.save(&s).unwrap();
        assert_eq!(store.list().unwrap(), vec!["alpha"]);
        assert_eq!(store.load("alpha").unwrap(), s);
        assert!(store.load("beta").is_err());
        assert!(store.load("../x").is_err());
    }
}
