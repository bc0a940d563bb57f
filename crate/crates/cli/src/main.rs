use std::io;

fn main() {
    let code = mveu_cli::run(
        std::env::args_os(),
        std::env::var(mveu_cli::TOL_ENV).ok(),
        mveu_cli::Streams {
            stdin: &mut io::stdin().lock(),
            stdout: &mut io::stdout().lock(),
            stderr: &mut io::stderr().lock(),
        },
    );
    std::process::exit(code);
}
