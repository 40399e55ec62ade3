use sigmarev_cli::http::HttpTransport;

fn main() {
    let transport = HttpTransport::default();
    let code = sigmarev_cli::run(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
        &transport,
    );
    std::process::exit(code);
}
