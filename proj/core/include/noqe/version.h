#ifndef NOQE_VERSION_H
#define NOQE_VERSION_H

namespace noqe {

const char *version_string();
const char *git_revision();

}  // namespace noqe

#endif
