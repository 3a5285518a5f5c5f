const int N = 32;

void matmul(int a[1024], int b[1024], int c[1024])
{
    int i;
    int j;
    int k;
    int sum;
    for (i = 0; i < N; i++) {
        for (j = 0; j < N; j++) {
            sum = 0;
            for (k = 0; k < N; k++) {
                sum = sum + a[i * 32 + k] * b[k * 32 + j];
            }
            c[i * 32 + j] = sum;
        }
    }
}
