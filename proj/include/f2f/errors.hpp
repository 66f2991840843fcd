#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace f2f {

// Base class for recoverable pipeline failures. code() is a stable
// machine-readable tag used in per-frame error records and exit paths;
// what() carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class NonPositiveDepth : public Error {
public:
    explicit NonPositiveDepth(double z)
        : Error("NonPositiveDepth",
                "point depth must be positive, got z=" + std::to_string(z)) {}
};

class NonPositiveDisparity : public Error {
public:
    NonPositiveDisparity(double disparity, const std::string& context = "")
        : Error("NonPositiveDisparity",
                context + (context.empty() ? "" : ": ") +
                    "disparity must be positive, got d=" + std::to_string(disparity)) {}
};

class EpipolarViolation : public Error {
public:
    EpipolarViolation(double residual_px, double tol_px, const std::string& context = "")
        : Error("EpipolarViolation",
                context + (context.empty() ? "" : ": ") + "vertical residual " +
                    std::to_string(residual_px) + " px exceeds tolerance " +
                    std::to_string(tol_px) + " px") {}
};

class DegenerateTorso : public Error {
public:
    explicit DegenerateTorso(const std::string& detail)
        : Error("DegenerateTorso", detail) {}
};

class DegenerateYAxis : public Error {
public:
    explicit DegenerateYAxis(const std::string& detail)
        : Error("DegenerateYAxis", detail) {}
};

class RankDeficient : public Error {
public:
    explicit RankDeficient(const std::string& detail)
        : Error("RankDeficient", detail) {}
};

class BehindCamera : public Error {
public:
    explicit BehindCamera(const std::string& detail)
        : Error("BehindCamera", detail) {}
};

class DegenerateAgreement : public Error {
public:
    DegenerateAgreement()
        : Error("DegenerateAgreement",
                "all ratings fall in a single category; kappa is undefined") {}
};

class AllFramesFailed : public Error {
public:
    explicit AllFramesFailed(int n_frames)
        : Error("AllFramesFailed", "no frame of " + std::to_string(n_frames) +
                                       " survived the pipeline") {}
};

} // namespace f2f
