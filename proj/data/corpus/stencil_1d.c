const int N = 1024;

void blur(int in[1026], int out[1024])
{
    int i;
    for (i = 0; i < N; i++) {
        out[i] = (in[i] + in[i + 1] + in[i + 2]) / 3;
    }
}
