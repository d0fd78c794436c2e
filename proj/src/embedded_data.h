#ifndef PATCLS_SRC_EMBEDDED_DATA_H_
#define PATCLS_SRC_EMBEDDED_DATA_H_

#include <string_view>

namespace patcls::embedded {

std::string_view TaxonomyConfig();
std::string_view Stopwords();

}  // namespace patcls::embedded

#endif  // PATCLS_SRC_EMBEDDED_DATA_H_
