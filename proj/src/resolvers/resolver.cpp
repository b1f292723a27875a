#include "phishdet/resolvers/resolver.hpp"

#include <algorithm>

namespace phishdet {

DomainAge make_domain_age(std::optional<Timestamp> creation_date, Timestamp reference_now) {
  DomainAge age;
  if (!creation_date) return age;
  age.creation_date = creation_date;
  const auto days = std::chrono::floor<std::chrono::days>(reference_now - *creation_date).count();
  age.age_days = std::max<std::int64_t>(0, days);
  return age;
}

}  // namespace phishdet
