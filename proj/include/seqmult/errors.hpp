// Copyright (c) 2026 the seqmult authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQMULT_ERRORS_HPP
#define SEQMULT_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace seqmult {

// Base of all library errors.  The CLI maps subclasses to stable exit codes:
// validation -> 2, non-convergence -> 3, infeasible spec -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: inconsistent batches, bad config, bad distribution
// parameters.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class InvalidParameterError : public ValidationError {
public:
    explicit InvalidParameterError(const std::string& msg) : ValidationError(msg) {}
};

// Cholesky failed even after the jitter retry; message names the matrix.
class FactorizationError : public Error {
public:
    explicit FactorizationError(const std::string& msg) : Error(msg) {}
};

// Rejection sampler ran out of budget; carries the observed acceptance rate.
class RejectionBudgetError : public Error {
public:
    RejectionBudgetError(const std::string& msg, double acceptance_rate)
        : Error(msg), acceptance_rate(acceptance_rate) {}
    double acceptance_rate;
};

// Gibbs sampler hit max_iters before the convergence gate opened; carries the
// last set of R-hat values for diagnosis.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, std::vector<double> rhat)
        : Error(msg), rhat(std::move(rhat)) {}
    std::vector<double> rhat;
};

// A data-generating spec that cannot produce a valid dataset.
class InfeasibleSpecError : public Error {
public:
    explicit InfeasibleSpecError(const std::string& msg) : Error(msg) {}
};

} // namespace seqmult

#endif // SEQMULT_ERRORS_HPP
