use std::time::Duration;

use sigmarev_core::{Transport, TransportError};

/// Blocking HTTP GET over `ureq`. Non-2xx responses become errors carrying
/// the status code.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build();
        HttpTransport {
            agent: config.into(),
        }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        HttpTransport::new(Duration::from_secs(30))
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String, TransportError> {
        let fail = |status, e: ureq::Error| TransportError {
            status,
            message: e.to_string(),
        };
        let mut resp = self.agent.get(url).call().map_err(|e| match e {
            ureq::Error::StatusCode(code) => fail(Some(code), e),
            other => fail(None, other),
        })?;
        resp.body_mut().read_to_string().map_err(|e| fail(None, e))
    }
}
