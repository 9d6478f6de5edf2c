#pragma once

#include "relfix/relmodel.hpp"
#include "relfix/score.hpp"

namespace relfix {
namespace kinship {

enum class Gender { Male, Female, Unknown };

struct Person {
    std::string id;
    Gender gender = Gender::Unknown;
    int generation = -1;  // top = 0
};

struct InconsistentSeeds : DomainError {
    using DomainError::DomainError;
};

// Persons with gender plus parent/spouse edges. apply_seed adds facts;
// closure rules (co-parents are spouses, spouses share children, spouses have
// opposite genders) run to fixpoint inside close().
class KinshipTree {
public:
    void ensure_person(const std::string& id);
    const std::map<std::string, Person>& persons() const { return persons_; }
    Gender gender(const std::string& id) const;
    int generation(const std::string& id) const;

    const std::set<std::pair<std::string, std::string>>& parent_edges() const {
        return parent_edges_;
    }
    std::vector<std::string> parents(const std::string& id) const;
    std::vector<std::string> children(const std::string& id) const;
    std::optional<std::string> spouse(const std::string& id) const;

    // Seed labels: father, mother, son, daughter, husband, wife. Idempotent.
    // Contradictions (gender clash, third parent) raise InconsistentSeeds.
    void apply_seed(const RelationAssertion& assertion);

    // Run inference rules to fixpoint and assign generations (top = 0).
    void close();

    void set_gender(const std::string& id, Gender g);
    void add_parent_edge(const std::string& parent, const std::string& child);
    void add_spouse_edge(const std::string& a, const std::string& b);

private:
    std::map<std::string, Person> persons_;
    std::set<std::pair<std::string, std::string>> parent_edges_;
    std::map<std::string, std::string> spouse_;  // symmetric
};

// Structural derivation of the 31-label vocabulary; returns std::nullopt
// (Unrelated) when the pair is outside the vocabulary's reach. At most one
// marriage hop; cousins are first cousins only.
std::optional<std::string> derive_relation(const KinshipTree& tree, const std::string& a,
                                           const std::string& b);

// derive_relation for every ordered pair, in-vocabulary pairs only.
std::map<std::pair<std::string, std::string>, std::string> full_closure(const KinshipTree& tree);

Context closure_context(const KinshipTree& tree, const std::string& dataset_name);

struct AnswerCheck {
    InconsistencyReport report;
    // Persons the model made both a male- and a female-gendered claim about.
    std::vector<std::string> gender_contradictions;
};

AnswerCheck check_answers(const std::vector<RelationAssertion>& assertions,
                          const std::map<std::pair<std::string, std::string>, std::string>& closure,
                          int n_objects, long long denominator_override = -1);

// Gender implied by a label on its subject ("A is the <label> of B" genders A).
Gender label_subject_gender(const std::string& label);

// The fixed reference 11-person instance and its 10 seed assertions.
KinshipTree fixed_tree();
std::vector<RelationAssertion> fixed_seeds();

std::string closure_csv(const std::map<std::pair<std::string, std::string>, std::string>& closure);

}  // namespace kinship
}  // namespace relfix
