// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! `lnt`: run the topology analyses on one snapshot or a directory of them.

mod args;
mod commands;
mod inputs;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// Failure categories and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Compute(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Compute(_) => 3,
        }
    }
}

impl From<lntopo::Error> for Failure {
    fn from(e: lntopo::Error) -> Self {
        use lntopo::Error::*;
        let msg = e.to_string();
        match e {
            Undefined(_) | DegenerateFit(_) | Numerical(_) | Disconnected => Failure::Compute(msg),
            _ => Failure::Input(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Input(m) | Failure::Compute(m) => m,
            };
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
