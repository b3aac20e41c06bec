fn main() -> std::process::ExitCode {
    sacsim::cli::run()
}
