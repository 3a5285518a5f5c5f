const int N = 4096;

void saxpy(int x[4096], int y[4096], int a)
{
    int i;
    #pragma stml iteration_independent
    for (i = 0; i < N; i++) {
        y[i] = a * x[i] + y[i];
    }
}
