#include <stdio.h>
#include <string.h>

#include "sol2eb.h"

#define EXPECT(cond)                                                       \
  do {                                                                     \
    if (!(cond)) {                                                         \
      const char *e = sol2eb_last_error();                                 \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,       \
              e ? e : "no error");                                         \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(int argc, char **argv) {
  if (argc != 2) {
    fprintf(stderr, "usage: smoke FILE.sol\n");
    return 2;
  }
  EXPECT(strlen(sol2eb_version()) > 0);

  Sol2ebProject *project = NULL;
  EXPECT(sol2eb_project_load(argv[1], &project) == SOL2EB_STATUS_OK);

  char *report = NULL;
  size_t violated = 99;
  EXPECT(sol2eb_project_check(project, 3, 0, 4, false, &report, &violated) == SOL2EB_STATUS_OK);
  EXPECT(violated == 0);
  EXPECT(strstr(report, "\"SetPass/inv4/INV\"") != NULL);
  sol2eb_string_free(report);

  Sol2ebSession *session = NULL;
  EXPECT(sol2eb_session_new(project, NULL, "{\"TRANSFER_VALUE\": 1}", 3, 0, 4, &session) == SOL2EB_STATUS_OK);
  EXPECT(sol2eb_session_fire(session, "NewAccount", "{\"a\": \"ADDRESS1\", \"b\": 3}", NULL) == SOL2EB_STATUS_OK);
  EXPECT(sol2eb_session_fire(session, "SetPass", "{\"hash\": 2, \"msg_sender\": \"ADDRESS1\", \"msg_value\": 9}", NULL) ==
         SOL2EB_STATUS_GUARD_FAILED);
  EXPECT(strstr(sol2eb_last_error(), "grd4") != NULL);

  char *state = NULL;
  EXPECT(sol2eb_session_fire(session, "SetPass", "{\"hash\": 2, \"msg_sender\": \"ADDRESS1\", \"msg_value\": 1}", &state) ==
         SOL2EB_STATUS_OK);
  EXPECT(strstr(state, "\"hashPass\":2") != NULL);
  sol2eb_string_free(state);

  EXPECT(sol2eb_session_fire(NULL, "SetPass", NULL, NULL) == SOL2EB_STATUS_NULL_POINTER);

  sol2eb_session_free(session);
  sol2eb_project_free(project);
  printf("ok\n");
  return 0;
}
