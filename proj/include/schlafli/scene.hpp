#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "schlafli/battery.hpp"
#include "schlafli/spaceform.hpp"

namespace schlafli {

struct SceneOptions {
  /// Replaces the seed of every stochastic task.
  std::optional<std::uint64_t> seed_override;
};

struct SceneResult {
  VerificationReport report;
  /// (task id, CSV text) for tasks that produce plot series.
  std::vector<std::pair<std::string, std::string>> plots;
};

/// A validated scene file (schema 1). Construction resolves every object
/// and task, so running a parsed scene only fails through report rows.
class Scene {
 public:
  /// Throws Error{SceneError} with the 1-based line and column of the
  /// offending JSON value.
  static Scene parse(std::string_view text);

  const SpaceForm& space() const;
  std::vector<std::string> object_ids() const;
  std::vector<std::string> task_ids() const;

  /// Runs the tasks in file order.
  SceneResult run(const SceneOptions& options = {}) const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

/// Catalog of scene object types with their parameter schemas.
std::string catalog_text();
std::string catalog_json();

}  // namespace schlafli
