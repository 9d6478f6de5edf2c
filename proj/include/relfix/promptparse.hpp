#pragma once

#include "relfix/datagen.hpp"
#include "relfix/relmodel.hpp"

namespace relfix {

enum class TemplateId {
    TemporalCompare,
    SpatialCompare,
    SpatialWithContext,
    KinshipInfer,
    InconsistencyDetect
};

std::string to_string(TemplateId t);
TemplateId template_from_string(const std::string& s);

struct PromptTask {
    const Dataset* dataset = nullptr;
    std::pair<std::string, std::string> pair;
    const Context* context = nullptr;  // optional
    TemplateId template_id = TemplateId::TemporalCompare;

    std::string task_id() const;
};

// Byte-exact template instantiation; rendering the same task twice yields
// identical bytes.
std::string render_prompt(const PromptTask& task);

enum class ParseFailure { NoBoxedAnswer, LabelOutOfVocabulary };

struct ParseResult {
    std::optional<RelationAssertion> assertion;
    std::optional<ParseFailure> failure;
    // Set when the answer sentence named the objects in reversed order and we
    // swapped them to match.
    bool reversed_pair = false;
    bool inconsistent_flag = false;  // the literal INCONSISTENT token
};

// Extracts the LAST \boxed{...} token; never throws on arbitrary bytes.
ParseResult parse_response(const std::string& raw, const PromptTask& task);

struct IngestionStats {
    int parsed = 0;
    int no_boxed_answer = 0;
    int label_out_of_vocabulary = 0;
    int reversed_pairs = 0;
    int inconsistent_flags = 0;
};

// All ordered pairs of a dataset as prompt tasks.
std::vector<PromptTask> make_tasks(const Dataset& dataset, const Context* context,
                                   TemplateId template_id);

}  // namespace relfix
