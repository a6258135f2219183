fn main() -> std::process::ExitCode {
    noiserank::cli::main()
}
