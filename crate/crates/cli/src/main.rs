//! `labe`: parameter generation, setup, key issuance, encryption,
//! decryption and policy inspection over files.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 unsatisfiable
//! parameters or bad usage, 3 policy not satisfied, 4 malformed input
//! file, 5 policy syntax error.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use labe_core::abe::{
    decrypt_bytes, encrypt_bytes_with_noise, keygen, noise_budget_check, select_params, setup, MasterSecretKey,
    NoiseMode, Profile, PublicParams, SystemParams, UserSecretKey,
};
use labe_core::encoding::{from_bytes, to_bytes, Artifact, CiphertextContainer};
use labe_core::gauss::RandomSource;
use labe_core::lsss::{compile_lsss, parse_policy};
use labe_core::zq::{centered, Modulus};
use labe_core::Error;

#[derive(Parser)]
#[command(name = "labe", version, about = "Attribute-based encryption from lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Choose system parameters and write them to a file.
    Params {
        #[arg(long)]
        n: usize,
        /// Row budget of every policy.
        #[arg(long = "L", value_name = "L")]
        cap_l: usize,
        #[arg(long, default_value = "toy", value_parser = parse_profile)]
        profile: Profile,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate public parameters and the master secret key.
    Setup {
        #[arg(long)]
        params: PathBuf,
        /// Output path for the public parameters.
        #[arg(long)]
        pp: PathBuf,
        /// Output path for the master secret key.
        #[arg(long)]
        msk: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Issue a key for a policy.
    Keygen {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long)]
        msk: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Encrypt a file under a comma-separated attribute list.
    Encrypt {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long)]
        attrs: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, hide = true)]
        zero_noise: bool,
    },
    /// Decrypt a file produced by `encrypt`.
    Decrypt {
        #[arg(long)]
        pp: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the share-generating matrix of a policy.
    PolicyInspect {
        #[arg(long)]
        policy: String,
        /// Compile over the modulus of this parameter file.
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SeedArg {
    /// 64 hex characters; without it the OS supplies entropy.
    #[arg(long, value_parser = parse_seed)]
    seed: Option<[u8; 32]>,
}

impl SeedArg {
    fn source(&self) -> RandomSource {
        RandomSource::from_optional_seed(self.seed)
    }
}

fn parse_seed(text: &str) -> Result<[u8; 32], String> {
    if text.len() != 64 {
        return Err(format!("expected 64 hex characters, got {}", text.len()));
    }
    let bytes = (0..32)
        .map(|i| u8::from_str_radix(&text[2 * i..2 * i + 2], 16))
        .collect::<Result<Vec<u8>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(bytes.try_into().expect("32 bytes"))
}

fn parse_profile(text: &str) -> Result<Profile, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Unsatisfiable(_)) => 2,
            CliError::Usage(_) => 2,
            CliError::Core(Error::Unauthorized) => 3,
            CliError::Core(Error::Malformed(_)) => 4,
            CliError::Core(Error::Syntax { .. }) => 5,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn load<T: Artifact>(path: &Path) -> CliResult<T> {
    let bytes = read_file(path)?;
    from_bytes(&bytes).map_err(|e| match e {
        Error::Malformed(msg) => Error::Malformed(format!("{}: {msg}", path.display())),
        other => other,
    }.into())
}

/// A file written to a temporary sibling; nothing appears at the final
/// path until [`Staged::commit`].
struct Staged {
    file: tempfile::NamedTempFile,
    path: PathBuf,
}

fn stage(path: &Path, bytes: &[u8], private: bool) -> CliResult<Staged> {
    let io = |source| CliError::Io { path: path.to_owned(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mode = if private { 0o600 } else { 0o644 };
        file.as_file().set_permissions(fs::Permissions::from_mode(mode)).map_err(io)?;
    }
    #[cfg(not(unix))]
    let _ = private;
    file.write_all(bytes).map_err(io)?;
    file.as_file().sync_all().map_err(io)?;
    Ok(Staged { file, path: path.to_owned() })
}

impl Staged {
    fn commit(self) -> CliResult<()> {
        let path = self.path;
        self.file
            .persist(&path)
            .map(|_| ())
            .map_err(|e| CliError::Io { path, source: e.error })
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    stage(path, bytes, false)?.commit()
}

fn distinct(inputs: &[&Path], outputs: &[&Path]) -> CliResult<()> {
    let key = |p: &Path| p.canonicalize().unwrap_or_else(|_| p.to_owned());
    for (k, out) in outputs.iter().enumerate() {
        if inputs.iter().chain(&outputs[..k]).any(|other| key(other) == key(out)) {
            return Err(CliError::Usage(format!("{} is used more than once", out.display())));
        }
    }
    Ok(())
}

fn parse_attrs(text: &str) -> CliResult<BTreeSet<String>> {
    let attrs: BTreeSet<String> =
        text.split(',').map(str::trim).filter(|a| !a.is_empty()).map(str::to_string).collect();
    if attrs.is_empty() {
        return Err(CliError::Usage("attribute list is empty".into()));
    }
    Ok(attrs)
}

fn print_params(p: &SystemParams) {
    println!("profile         {}", p.profile());
    println!("n               {}", p.n());
    println!("L               {}", p.cap_l());
    println!("m               {}", p.m());
    println!("q bits          {}", p.q().bits());
    println!("q               {}", p.q());
    println!("sigma           {:.6e}", p.sigma().sigma());
    println!("alpha           {:.6e}", p.alpha().alpha());
    println!("c_omega         {}", p.c_omega());
    println!("noise budget    {}", if noise_budget_check(p) { "ok" } else { "exceeded" });
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Params { n, cap_l, profile, out } => {
            let params = select_params(n, cap_l, profile)?;
            write_atomic(&out, &to_bytes(&params))?;
            print_params(&params);
        }
        Command::Setup { params, pp, msk, seed } => {
            distinct(&[&params], &[&pp, &msk])?;
            let sys: SystemParams = load(&params)?;
            sys.validate()?;
            let (public, master) = setup(&sys, &mut seed.source())?;
            let staged_pp = stage(&pp, &to_bytes(&public), false)?;
            let staged_msk = stage(&msk, &to_bytes(&master), true)?;
            staged_pp.commit()?;
            staged_msk.commit()?;
        }
        Command::Keygen { pp, msk, policy, out, seed } => {
            distinct(&[&pp, &msk], &[&out])?;
            let ast = parse_policy(&policy)?;
            let public: PublicParams = load(&pp)?;
            let master: MasterSecretKey = load(&msk)?;
            let cap_l = public.params.cap_l();
            let compiled = compile_lsss(&ast, public.params.q());
            let padded = compiled.padded(cap_l).map_err(|_| {
                CliError::Usage(format!("policy needs {} rows but L = {cap_l}", compiled.l()))
            })?;
            let sk = keygen(&public, &master, &padded, &mut seed.source())?;
            write_atomic(&out, &to_bytes(&sk))?;
        }
        Command::Encrypt { pp, attrs, input, out, seed, zero_noise } => {
            distinct(&[&pp, &input], &[&out])?;
            let attrs = parse_attrs(&attrs)?;
            let public: PublicParams = load(&pp)?;
            let payload = read_file(&input)?;
            let noise = if zero_noise { NoiseMode::Zero } else { NoiseMode::Gaussian };
            let cts = encrypt_bytes_with_noise(&public, &attrs, &payload, noise, &mut seed.source())?;
            write_atomic(&out, &to_bytes(&CiphertextContainer(cts)))?;
        }
        Command::Decrypt { pp, sk, input, out } => {
            distinct(&[&pp, &sk, &input], &[&out])?;
            let public: PublicParams = load(&pp)?;
            let key: UserSecretKey = load(&sk)?;
            let container: CiphertextContainer = load(&input)?;
            let payload = decrypt_bytes(&public, &key, &container.0)?;
            write_atomic(&out, &payload)?;
        }
        Command::PolicyInspect { policy, params } => {
            let ast = parse_policy(&policy)?;
            let q = match params {
                Some(path) => load::<SystemParams>(&path)?.q().clone(),
                None => Modulus::from_u64((1 << 61) - 1)?,
            };
            let compiled = compile_lsss(&ast, &q);
            println!("policy  {ast}");
            println!("l       {}", compiled.l());
            println!("n_cols  {}", compiled.n_cols());
            let width = compiled.rho().iter().map(|r| r.chars().count()).max().unwrap_or(0);
            for i in 0..compiled.l() {
                let row: Vec<String> = compiled
                    .matrix()
                    .row(i)
                    .entries()
                    .iter()
                    .map(|v| centered(v, &q).to_string())
                    .collect();
                println!("{i:>3}  {:<width$}  [{}]", compiled.label(i), row.join(", "));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("labe: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
