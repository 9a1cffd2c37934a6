#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>

namespace augforge::harness {

/// Study report: per complete trial the (active augmentation count,
/// objective) pair, the best trial, and per-count mean/max aggregates — the
/// data behind an augmentation-count vs. score scatter.
nlohmann::ordered_json report_study(const std::filesystem::path& db_path);

} // namespace augforge::harness
