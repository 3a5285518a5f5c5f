const int N = 256;

void find_first(int v[256], int key, int out[1])
{
    int i;
    out[0] = -1;
    for (i = 0; i < N; i++) {
        if (v[i] == key) {
            out[0] = i;
            break;
        }
    }
}
