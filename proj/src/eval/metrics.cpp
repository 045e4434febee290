#include "claimguard/eval/metrics.hpp"

#include <fmt/format.h>

namespace claimguard::eval {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

constexpr std::array<Label, 3> kClasses = {Label::True, Label::False, Label::Nei};

} // namespace

std::size_t class_index(Label label) noexcept {
    switch (label) {
    case Label::True: return 0;
    case Label::False: return 1;
    case Label::Nei: return 2;
    }
    return 2;
}

MetricsReport compute_metrics(const Confusion& confusion) {
    MetricsReport m;
    m.confusion = confusion;
    std::size_t correct = 0;
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t p = 0; p < 3; ++p) m.total += confusion[g][p];
        correct += confusion[g][g];
    }
    m.accuracy = ratio(static_cast<double>(correct), static_cast<double>(m.total));

    for (std::size_t c = 0; c < 3; ++c) {
        std::size_t predicted = 0;
        std::size_t gold = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            predicted += confusion[i][c];
            gold += confusion[c][i];
        }
        auto& s = m.per_class[c];
        const double tp = static_cast<double>(confusion[c][c]);
        s.support = gold;
        s.precision = ratio(tp, static_cast<double>(predicted));
        s.recall = ratio(tp, static_cast<double>(gold));
        s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall);

        m.macro.precision += s.precision / 3.0;
        m.macro.recall += s.recall / 3.0;
        m.macro.f1 += s.f1 / 3.0;
        const double w = ratio(static_cast<double>(gold), static_cast<double>(m.total));
        m.weighted.precision += w * s.precision;
        m.weighted.recall += w * s.recall;
        m.weighted.f1 += w * s.f1;
    }
    return m;
}

MetricsReport compute_metrics(std::span<const Label> gold, std::span<const Label> predicted) {
    if (gold.size() != predicted.size()) throw InvalidArgument("gold and predicted label counts differ");
    Confusion c{};
    for (std::size_t i = 0; i < gold.size(); ++i) ++c[class_index(gold[i])][class_index(predicted[i])];
    return compute_metrics(c);
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json classes = nlohmann::json::object();
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& s = per_class[c];
        classes[std::string(to_string(kClasses[c]))] = {
            {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"support", s.support}};
    }
    const auto avg = [](const Averages& a) {
        return nlohmann::json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
    };
    return {
        {"total", total},
        {"accuracy", accuracy},
        {"weighted", avg(weighted)},
        {"macro", avg(macro)},
        {"per_class", std::move(classes)},
        {"confusion", {{"order", {"true", "false", "nei"}}, {"rows_gold_cols_predicted", confusion}}},
    };
}

std::string MetricsReport::table(std::string_view title) const {
    const auto pct = [](double v) { return fmt::format("{:.2f}", 100.0 * v); };
    std::string out;
    out += fmt::format("{:<28} {:>7} {:>7} {:>7} {:>7}\n", "Method", "Acc.", "Prec.", "Rec.", "F1");
    out += fmt::format("{:<28} {:>7} {:>7} {:>7} {:>7}\n", title, pct(accuracy), pct(weighted.precision),
                       pct(weighted.recall), pct(weighted.f1));
    out += fmt::format("\n{:<28} {:>7} {:>7} {:>7} {:>7}\n", "Class", "Support", "Prec.", "Rec.", "F1");
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& s = per_class[c];
        out += fmt::format("{:<28} {:>7} {:>7} {:>7} {:>7}\n", to_string(kClasses[c]), s.support,
                           pct(s.precision), pct(s.recall), pct(s.f1));
    }
    return out;
}

} // namespace claimguard::eval
