// SPDX-License-Identifier: MIT
namespace gridlab {}
