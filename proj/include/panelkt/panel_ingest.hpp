#pragma once

#include "panelkt/panel.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace panelkt {

/// Entity x year table for one indicator; absent cells are std::nullopt.
class IndicatorTable {
public:
    IndicatorTable() = default;
    IndicatorTable(std::size_t entities, std::size_t years) : years_(years), cells_(entities * years) {}

    std::optional<double>& at(std::size_t entity, std::size_t year) { return cells_[entity * years_ + year]; }
    const std::optional<double>& at(std::size_t entity, std::size_t year) const {
        return cells_[entity * years_ + year];
    }
    std::size_t entities() const noexcept { return years_ ? cells_.size() / years_ : 0; }
    std::size_t years() const noexcept { return years_; }
    std::size_t missing() const noexcept;

    friend bool operator==(const IndicatorTable&, const IndicatorTable&) = default;

private:
    std::size_t years_ = 0;
    std::vector<std::optional<double>> cells_;
};

/// Multivariate panel of entities (e.g. countries) over a shared year grid.
/// All indicator tables share entity order and grid.
struct RawPanel {
    std::vector<std::string> entities;
    std::vector<int> years;
    std::map<std::string, IndicatorTable> indicators;
    std::map<std::string, std::string> indicator_target;  ///< indicator -> target
    std::map<std::string, std::string> entity_group;      ///< entity -> group label

    std::size_t entity_index(const std::string& id) const;
    std::size_t missing() const;

    /// Same panel restricted to the listed entities, in the listed order.
    RawPanel select_entities(const std::vector<std::string>& ids) const;

    friend bool operator==(const RawPanel&, const RawPanel&) = default;
};

enum class CsvLayout {
    Long,  ///< entity, year, indicator, value
    Wide,  ///< entity, indicator, <year>, <year>, ...
};

struct IngestSchema {
    CsvLayout layout = CsvLayout::Long;
    std::string entity_column = "entity";
    std::string year_column = "year";
    std::string indicator_column = "indicator";
    std::string value_column = "value";
    std::map<std::string, std::string> targets;  ///< indicator -> target
    std::map<std::string, std::string> groups;   ///< entity -> group

    // Optional sample-panel selection used by the CLI.
    std::string mode;  ///< "", "two-sample" or "independence"
    std::string target;
    std::string target_b;
    std::string group_x;
    std::string group_y;
};

/// Reads an INI schema file: [columns] layout/entity/year/indicator/value,
/// [targets] indicator = target, [groups] entity = label, [select] mode/...
IngestSchema load_schema(const std::filesystem::path& path);

RawPanel load_csv(std::istream& in, const IngestSchema& schema);
RawPanel load_csv(const std::filesystem::path& path, const IngestSchema& schema);

/// Long-layout serialisation; missing cells are written as empty fields.
void write_long_csv(std::ostream& out, const RawPanel& panel);

struct ImputeOptions {
    /// z-score each (indicator, year) coordinate across entities before
    /// measuring entity distances.
    bool standardise = true;
};

struct ImputeReport {
    std::size_t cells_filled = 0;
    std::vector<std::size_t> donors_per_cell;
};

/// Fill for one missing cell from (value, distance) donors: inverse-distance
/// weighted mean; a zero-distance donor's value is taken directly (averaged
/// if several). Throws DegenerateError for an empty donor list.
struct Donor {
    double value;
    double distance;
};
[[nodiscard]] double inverse_distance_fill(const std::vector<Donor>& donors);

/// Euclidean distances between entity profiles over mutually observed
/// (indicator, year) coordinates; infinity when nothing is shared.
[[nodiscard]] Matrix entity_distances(const RawPanel& panel, const ImputeOptions& options = {});

/// Fills every missing cell from the other entities observed at the same
/// (indicator, year), weighted by inverse entity distance. Observed cells are
/// left untouched. Throws InputError naming the first unimputable cell.
[[nodiscard]] RawPanel impute(const RawPanel& panel, const ImputeOptions& options = {},
                              ImputeReport* report = nullptr);

/// Unweighted mean over the indicators of each target, per (entity, year);
/// cells where every indicator is missing stay missing.
[[nodiscard]] RawPanel aggregate_to_targets(const RawPanel& panel);

struct PanelSelection {
    SamplePanel x;
    SamplePanel y;
    std::vector<std::string> x_entities;
    std::vector<std::string> y_entities;
};

/// Two-sample mode: rows of group_x entities vs rows of group_y entities for
/// one indicator/target.
[[nodiscard]] PanelSelection to_two_sample_panels(const RawPanel& panel, const std::string& target,
                                                  const std::string& group_x, const std::string& group_y);

/// Independence mode: every entity's row for target_a vs the same entities,
/// same order, for target_b.
[[nodiscard]] PanelSelection to_independence_panels(const RawPanel& panel, const std::string& target_a,
                                                    const std::string& target_b);

/// Complete entity x year matrix of one indicator as a SamplePanel.
[[nodiscard]] SamplePanel indicator_panel(const RawPanel& panel, const std::string& indicator);

}  // namespace panelkt
